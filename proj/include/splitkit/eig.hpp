#pragma once

#include <complex>
#include <vector>

#include "splitkit/linalg.hpp"

namespace splitkit {

// All eigenvalues of a real square matrix: balancing, Householder reduction
// to Hessenberg form and the Francis double-shift QR iteration.
std::vector<std::complex<double>> eigenvalues(const Matrix& a);

// Largest eigenvalue modulus.
double spectral_radius_dense(const Matrix& a);

}  // namespace splitkit
