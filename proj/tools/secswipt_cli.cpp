// SPDX-License-Identifier: Apache-2.0

#include <cstdio>

int main() {
    std::puts("secswipt cli placeholder");
    return 0;
}
