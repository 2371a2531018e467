#include "splitkit/eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "splitkit/error.hpp"

namespace splitkit {

namespace {

// Diagonal similarity by powers of two that evens out row and column norms.
void balance(Matrix& a) {
  const std::size_t n = a.rows();
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::fabs(a(j, i));
        r += std::fabs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Householder reduction to upper Hessenberg form, in place.
void hessenberg(Matrix& a) {
  const std::size_t n = a.rows();
  if (n < 3) return;
  std::vector<double> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double scale = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) scale += std::fabs(a(i, k));
    if (scale == 0.0) continue;
    double norm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i] = a(i, k) / scale;
      norm2 += v[i] * v[i];
    }
    const double alpha = v[k + 1] >= 0.0 ? -std::sqrt(norm2) : std::sqrt(norm2);
    v[k + 1] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 == 0.0) continue;
    const double beta = 2.0 / vnorm2;
    // A <- H A with H = I - beta v v^T acting on rows k+1..n-1.
    for (std::size_t j = k; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += v[i] * a(i, j);
      s *= beta;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
    }
    // A <- A H acting on columns k+1..n-1.
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      s *= beta;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
    }
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

double sign(double a, double b) { return b >= 0.0 ? std::fabs(a) : -std::fabs(a); }

// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
std::vector<std::complex<double>> hqr(Matrix& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<std::complex<double>> w(static_cast<std::size_t>(n));
  auto at = [&](int i, int j) -> double& { return a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)); };
  const double eps = std::numeric_limits<double>::epsilon();
  // Per-eigenvalue budget as in LAPACK. Clusters of defective zero
  // eigenvalues from block operators can need far more than a few dozen.
  const int max_its = 30 * std::max(10, n);
  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::fabs(at(i, j));
  int nn = n - 1;
  double t = 0.0;
  double p = 0.0, q = 0.0, r = 0.0, s = 0.0, x = 0.0, y = 0.0, z = 0.0, ww = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l > 0; --l) {
        s = std::fabs(at(l - 1, l - 1)) + std::fabs(at(l, l));
        if (s == 0.0) s = anorm;
        if (std::fabs(at(l, l - 1)) <= eps * s) {
          at(l, l - 1) = 0.0;
          break;
        }
      }
      x = at(nn, nn);
      if (l == nn) {
        w[static_cast<std::size_t>(nn)] = x + t;
        --nn;
      } else {
        y = at(nn - 1, nn - 1);
        ww = at(nn, nn - 1) * at(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + ww;
          z = std::sqrt(std::fabs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign(z, p);
            double lo = x + z, hi = x + z;
            if (z != 0.0) hi = x - ww / z;
            w[static_cast<std::size_t>(nn - 1)] = lo;
            w[static_cast<std::size_t>(nn)] = hi;
          } else {
            w[static_cast<std::size_t>(nn)] = {x + p, -z};
            w[static_cast<std::size_t>(nn - 1)] = {x + p, z};
          }
          nn -= 2;
        } else {
          if (its == max_its) fail(ErrorCode::Internal, "QR iteration did not converge");
          if (its % 10 == 0 && its > 0) {
            // Exceptional shift.
            t += x;
            for (int i = 0; i <= nn; ++i) at(i, i) -= x;
            s = std::fabs(at(nn, nn - 1)) + std::fabs(at(nn - 1, nn - 2));
            y = x = 0.75 * s;
            ww = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = at(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - ww) / at(m + 1, m) + at(m, m + 1);
            q = at(m + 1, m + 1) - z - r - s;
            r = at(m + 2, m + 1);
            s = std::fabs(p) + std::fabs(q) + std::fabs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::fabs(at(m, m - 1)) * (std::fabs(q) + std::fabs(r));
            const double v = std::fabs(p) * (std::fabs(at(m - 1, m - 1)) + std::fabs(z) + std::fabs(at(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m; i < nn - 1; ++i) {
            at(i + 2, i) = 0.0;
            if (i != m) at(i + 2, i - 1) = 0.0;
          }
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = at(k, k - 1);
              q = at(k + 1, k - 1);
              r = 0.0;
              if (k + 1 != nn) r = at(k + 2, k - 1);
              if ((x = std::fabs(p) + std::fabs(q) + std::fabs(r)) != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            if ((s = sign(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
              if (k == m) {
                if (l != m) at(k, k - 1) = -at(k, k - 1);
              } else {
                at(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = at(k, j) + q * at(k + 1, j);
                if (k + 1 != nn) {
                  p += r * at(k + 2, j);
                  at(k + 2, j) -= p * z;
                }
                at(k + 1, j) -= p * y;
                at(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * at(i, k) + y * at(i, k + 1);
                if (k + 1 != nn) {
                  p += z * at(i, k + 2);
                  at(i, k + 2) -= p * r;
                }
                at(i, k + 1) -= p * q;
                at(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l + 1 < nn);
  }
  return w;
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
  if (!a.square()) fail(ErrorCode::ShapeMismatch, "eigenvalues need a square matrix");
  for (double v : a.data())
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "matrix has non-finite entries");
  if (a.rows() == 0) return {};
  Matrix h = a;
  balance(h);
  hessenberg(h);
  return hqr(h);
}

double spectral_radius_dense(const Matrix& a) {
  double best = 0.0;
  for (const auto& l : eigenvalues(a)) best = std::max(best, std::abs(l));
  return best;
}

}  // namespace splitkit
