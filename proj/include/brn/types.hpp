#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace brn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Point outside the domain, or dimension mismatch with the domain.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Evaluation at (or too close to) the diagonal x = y of a Green kernel.
class SingularityError : public std::runtime_error {
public:
    explicit SingularityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Space dimension outside the range supported by the requested operation.
class DimensionError : public std::runtime_error {
public:
    explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

/// MFS boundary fit did not reach the required residual.
class FitError : public std::runtime_error {
public:
    FitError(const std::string& msg, double residual)
        : std::runtime_error(msg), boundary_residual(residual) {}
    double boundary_residual;
};

/// Base points handed to the scale-only solve admit no fully stationary scales.
class InconsistentBasePointsError : public std::runtime_error {
public:
    explicit InconsistentBasePointsError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Space dimension. Valid from n = 2 (sphere areas); the reduction theorems
/// need n >= 5, and n = 5 is flagged as borderline.
class Dimension {
public:
    explicit Dimension(int n) : n_(n) {
        if (n < 2) throw DimensionError("dimension must be >= 2, got " + std::to_string(n));
    }
    int value() const { return n_; }
    bool reduction_supported() const { return n_ >= 5; }
    bool borderline_n5() const { return n_ == 5; }

private:
    int n_;
};

}  // namespace brn
