#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace causalreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Observed data: design X (n x p), response Y (n), optional anchors A (n x r).
struct Dataset {
    Matrix X;
    Vector Y;
    Matrix A;  // zero columns when absent
    std::vector<std::string> x_names;
    std::vector<std::string> a_names;

    Index n() const { return X.rows(); }
    Index p() const { return X.cols(); }
    bool has_anchors() const { return A.cols() > 0; }
};

} // namespace causalreg
