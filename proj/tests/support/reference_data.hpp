#pragma once

// Published tables used as reference data by the tests.

#include <array>

#include <Eigen/Dense>

namespace concord::testdata {

/// Normalized factors per stage: columns x1, f1..f5.
inline Eigen::MatrixXd factor_panel() {
    Eigen::MatrixXd t(12, 6);
    t << 0.251, 0.000, 0.000, 0.317, 0.714, 0.667,
         0.012, 0.007, 0.000, 0.000, 0.571, 0.333,
         0.033, 0.086, 0.000, 0.124, 0.429, 0.333,
         0.029, 0.287, 0.000, 0.286, 0.286, 0.667,
         0.012, 0.247, 0.000, 0.617, 0.143, 0.000,
         0.148, 0.315, 0.224, 0.122, 1.000, 1.000,
         0.070, 0.485, 0.224, 0.335, 0.143, 0.333,
         0.170, 0.757, 0.224, 0.538, 0.000, 0.333,
         0.347, 0.698, 0.224, 0.887, 0.571, 0.333,
         0.428, 0.759, 1.000, 1.000, 0.857, 0.333,
         0.452, 0.830, 1.000, 0.307, 0.143, 0.667,
         0.501, 1.000, 1.000, 0.999, 0.286, 0.667;
    return t;
}

/// Regression equation coefficients: c0, c1..c5.
inline Eigen::VectorXd fitted_equation() {
    Eigen::VectorXd c(6);
    c << -0.075, -0.006, 0.262, 0.216, 0.029, 0.179;
    return c;
}

inline Eigen::MatrixXd discrete_pcm() {
    Eigen::MatrixXd m(5, 5);
    m << 1, 2, 2, 2, 2,
         0, 1, 0, 0, 2,
         0, 2, 1, 0, 2,
         0, 2, 2, 1, 2,
         0, 0, 0, 0, 1;
    return m;
}

inline Eigen::MatrixXd continuous_pcm() {
    Eigen::MatrixXd m(5, 5);
    m << 0.5,  0.85, 0.3,  0.4, 0.2,
         0.15, 0.5,  0.1,  0.2, 0.1,
         0.7,  0.9,  0.5,  0.6, 0.55,
         0.6,  0.8,  0.4,  0.5, 0.3,
         0.8,  0.9,  0.45, 0.7, 0.5;
    return m;
}

inline Eigen::VectorXd objective_weights() {
    Eigen::VectorXd v(5);
    v << -0.008, 0.384, 0.317, 0.043, 0.263;
    return v;
}

inline Eigen::VectorXd subjective_weights() {
    Eigen::VectorXd v(5);
    v << 0.253, 0.138, 0.287, 0.178, 0.144;
    return v;
}

}  // namespace concord::testdata
