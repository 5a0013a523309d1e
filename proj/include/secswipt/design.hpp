// SPDX-License-Identifier: Apache-2.0
//
// Shared design-result types for the perfect-CSI and robust designers.

#pragma once

#include <secswipt/channel.hpp>
#include <secswipt/conic.hpp>

#include <limits>
#include <map>
#include <string>
#include <vector>

namespace secswipt {

struct BeamformingDesign {
    ComplexMatrix Q;          // information covariance [W]
    ComplexMatrix W;          // artificial-noise covariance [W]
    std::vector<double> rho;  // power-splitting ratio per CR, in (0,1]
    ComplexVector q;          // extracted beam, Q ~ q q^H [sqrt(W)]
    bool rank_warning = false;
};

struct ExtractedBeam {
    ComplexVector q;
    bool rank_warning = false;
};

/// Dominant-eigenpair beam q = sqrt(lambda1) v1; warns when lambda2/lambda1
/// exceeds 1e-6. The zero matrix yields a zero beam with the warning set.
inline ExtractedBeam extract_beamformer(const ComplexMatrix& q_cov) {
    ExtractedBeam out;
    if (q_cov.norm() == 0.0) {
        out.q = ComplexVector::Zero(q_cov.rows());
        out.rank_warning = true;
        return out;
    }
    EighResult e = eigh(q_cov);
    double l1 = std::max(e.values(0), 0.0);
    out.q = std::sqrt(l1) * e.vectors.col(0);
    if (e.values.size() > 1 && l1 > 0.0) out.rank_warning = std::max(e.values(1), 0.0) / l1 > 1e-6;
    return out;
}

struct DesignResult {
    conic::Status status = conic::Status::numerical_failure;
    BeamformingDesign design;
    double objective = std::numeric_limits<double>::quiet_NaN();  // tr(Q) [W]
    double t_star = std::numeric_limits<double>::quiet_NaN();     // 1-D path only
    std::vector<double> objective_trace;  // f(t) per grid point or SPCA history
    int iterations = 0;
    int solves = 0;
    double wall_ms = 0.0;

    // certificates, evaluated against the channels the designer was given
    double rank_gap = std::numeric_limits<double>::quiet_NaN();
    double min_secrecy_slack = std::numeric_limits<double>::quiet_NaN();  // bps/Hz
    double min_eh_slack_cr = std::numeric_limits<double>::quiet_NaN();    // W
    double min_eh_slack_er = std::numeric_limits<double>::quiet_NaN();    // W
    double power_slack = std::numeric_limits<double>::quiet_NaN();        // W
    bool conservative_clamp = false;    // robust SPCA shifted-Gram clamp engaged
    bool secrecy_shortfall = false;     // exact log-det rate below target (finding)

    std::map<std::string, std::vector<double>> duals;  // "xi_l", "mu_l" at t*

    bool feasible() const { return status == conic::Status::optimal; }
    double objective_dbm() const { return watt_to_dbm(objective); }
};

}  // namespace secswipt
