#pragma once

#include <string>
#include <vector>

#include "dse/linalg.hpp"

namespace dse {

/// Continuous-time LTI plant observed by N sensors, in the coordinates the
/// user supplies. The stacked pair (C, A) must be jointly observable.
class LtiSystem {
   public:
    LtiSystem(Matrix a, std::vector<Matrix> sensor_blocks);

    const Matrix& a() const { return a_; }
    const std::vector<Matrix>& sensor_blocks() const { return sensors_; }
    Matrix stacked_c() const;

    int state_dim() const { return static_cast<int>(a_.rows()); }
    int sensor_count() const { return static_cast<int>(sensors_.size()); }
    int output_dim(int i) const { return static_cast<int>(sensors_[static_cast<size_t>(i)].rows()); }

    bool is_hurwitz(double margin = 0.0) const;

    /// Rank of the stacked observability matrix; n means jointly observable.
    int joint_observability_rank() const;

   private:
    Matrix a_;
    std::vector<Matrix> sensors_;
};

/// Stacked observability matrix [C; CA; ...; CA^{n-1}].
Matrix observability_matrix(const Matrix& c, const Matrix& a);

/// Result of the multisensor observable staircase decomposition: an
/// orthogonal T with x_orig = T x_new, block-lower-triangular (A_can, C_can),
/// and block sizes dims[i] (the state directions newly observable by the
/// i-th sensor in the given order). Some dims[i] may be zero.
struct CanonicalForm {
    Matrix t;
    Matrix a_can;
    Matrix c_can;
    std::vector<int> dims;        // per position in the decomposition order
    std::vector<int> order;       // sensor index at each position (0-based)
    std::vector<int> state_off;   // prefix sums of dims
    std::vector<int> output_off;  // prefix sums of sensor output dims, in order

    int block_count() const { return static_cast<int>(dims.size()); }
    int state_dim() const { return static_cast<int>(a_can.rows()); }
    int prefix_dim(int i) const { return state_off[static_cast<size_t>(i)] + dims[static_cast<size_t>(i)]; }

    Eigen::Block<const Matrix> a_block(int j, int k) const;
    Eigen::Block<const Matrix> c_block(int j, int k) const;
    /// Rows of C_can belonging to the sensor at position j.
    Eigen::Block<const Matrix> c_rows(int j) const;
};

struct ValidationCheck {
    std::string name;
    bool pass = false;
    double magnitude = 0.0;  // worst violation seen for this check
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool all_pass() const;
};

/// Recursive observable/unobservable splitting: position k of `order` claims
/// the part of the remaining subspace observable through its sensor, and the
/// A-invariant unobservable complement is passed on. Joint observability
/// guarantees nothing is left at the end; otherwise a ConfigError reports the
/// rank deficit. Deterministic (SVD bases with canonical column signs).
CanonicalForm decompose(const LtiSystem& sys, const std::vector<int>& order);

/// Convenience overload using sensor order 0..N-1.
CanonicalForm decompose(const LtiSystem& sys);

/// Checks every CanonicalForm invariant against the system; report only.
ValidationReport validate(const CanonicalForm& cf, const LtiSystem& sys, double tol = 1e-10);

}  // namespace dse
