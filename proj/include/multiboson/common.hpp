#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace multiboson {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::Vector2cd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Permutation of {0..n-1} stored as an image list: rho[i] is where i maps to.
using Permutation = std::vector<int>;

/// Input violates a structural or physical validity requirement.
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A numerical routine failed to reach its accuracy target.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The requested size exceeds a declared cost guard.
class FeasibilityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file or unrecognized schema.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

bool is_permutation(const Permutation& rho);
Permutation identity_permutation(int n);
Permutation inverse_permutation(const Permutation& rho);

double factorial(int n);
double binomial(int n, int k);

/// Worker budget for parallel kernels: MULTIBOSON_THREADS if set (>= 1),
/// otherwise the hardware concurrency.
int worker_count();

}  // namespace multiboson
