// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dtnspec {

using cplx = std::complex<double>;

using VecR = Eigen::VectorXd;
using VecC = Eigen::VectorXcd;
using MatR = Eigen::MatrixXd;
using MatC = Eigen::MatrixXcd;
using SpMatR = Eigen::SparseMatrix<double>;
using SpMatC = Eigen::SparseMatrix<cplx>;

/// Complex values on interior nodes; pairings use the interior weight h^d.
using InteriorField = VecC;
/// Complex values on Dirichlet-boundary nodes; pairings use the per-node boundary weights.
using BoundaryVector = VecC;

enum class ErrorKind {
  InvalidArgument,
  ShapeMismatch,
  NearSpectrum,
  DegenerateParameters,
  SingularRobinPencil,
  ContourTouchesSpectrum,
  NotAnEigenvalue,
  EndpointOnEigenvalue,
  AtomHit,
  Inconclusive,
  QuadratureFailure,
  Config,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NearSpectrum: return "NearSpectrum";
    case ErrorKind::DegenerateParameters: return "DegenerateParameters";
    case ErrorKind::SingularRobinPencil: return "SingularRobinPencil";
    case ErrorKind::ContourTouchesSpectrum: return "ContourTouchesSpectrum";
    case ErrorKind::NotAnEigenvalue: return "NotAnEigenvalue";
    case ErrorKind::EndpointOnEigenvalue: return "EndpointOnEigenvalue";
    case ErrorKind::AtomHit: return "AtomHit";
    case ErrorKind::Inconclusive: return "Inconclusive";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace dtnspec
