#include "risloc/ris_aoa.hpp"

#include <algorithm>
#include <cmath>

#include "risloc/errors.hpp"

namespace risloc {

namespace {

constexpr double kSpectrumFloor = 1e-18;
constexpr double kRankTolerance = 1e-12;

// ||U^H a(alpha, beta)||^2 written as a 2-D trigonometric polynomial over element lags:
//   f = Re sum_{p,q} c(p,q) exp(j (p alpha + q beta)),  c(-p,-q) = conj(c(p,q)).
// Only lags p >= 0 are stored. Fixing beta first collapses each grid row to an nx-term sum.
class SubspaceEnergy {
 public:
  SubspaceEnergy(const CMatrix& u, int nx, int ny) : nx_(nx), ny_(ny), lags_(nx, 2 * ny - 1) {
    const CMatrix q = u * u.adjoint();
    lags_.setZero();
    for (int p = 0; p < nx; ++p) {
      for (int dq = -(ny - 1); dq <= ny - 1; ++dq) {
        Complex acc;
        for (int m = 0; m + p < nx; ++m) {
          for (int n = std::max(0, -dq); n < ny && n + dq < ny; ++n) {
            acc += q(m * ny + n, (m + p) * ny + (n + dq));
          }
        }
        lags_(p, dq + ny - 1) = acc;
      }
    }
  }

  void fix_beta(double beta, std::vector<Complex>& d) const {
    d.assign(nx_, Complex{});
    const Complex z = std::polar(1.0, beta);
    std::vector<Complex> pw(ny_);
    pw[0] = 1.0;
    for (int q = 1; q < ny_; ++q) pw[q] = pw[q - 1] * z;
    for (int p = 0; p < nx_; ++p) {
      Complex acc = lags_(p, ny_ - 1);
      for (int q = 1; q < ny_; ++q) {
        acc += lags_(p, ny_ - 1 + q) * pw[q] + lags_(p, ny_ - 1 - q) * std::conj(pw[q]);
      }
      d[p] = acc;
    }
  }

  double eval(const std::vector<Complex>& d, double alpha) const {
    const Complex z = std::polar(1.0, alpha);
    Complex zp = z;
    double f = d[0].real();
    for (int p = 1; p < nx_; ++p) {
      f += 2.0 * std::real(d[p] * zp);
      zp *= z;
    }
    return f;
  }

 private:
  int nx_;
  int ny_;
  CMatrix lags_;
};

bool is_vertical(const Vec3& v) { return std::abs(v.x()) < 1e-12 && std::abs(v.y()) < 1e-12; }

// Reorders element-indexed rows from (mx, my) to (my, mx) order.
CMatrix swap_axes(const CMatrix& u, int nx, int ny) {
  CMatrix out(u.rows(), u.cols());
  for (int m = 0; m < nx; ++m) {
    for (int n = 0; n < ny; ++n) out.row(n * nx + m) = u.row(m * ny + n);
  }
  return out;
}

double parabolic_offset(double left, double mid, double right) {
  const double denom = left - 2.0 * mid + right;
  if (!(denom < 0.0)) return 0.0;
  return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
}

}  // namespace

int GainSeries::present() const {
  return static_cast<int>(std::count_if(gains.begin(), gains.end(),
                                        [](const auto& g) { return g.has_value(); }));
}

AzEl SpectrumGrid::argmax() const {
  Eigen::Index i = 0, j = 0;
  values.maxCoeff(&i, &j);
  return {azimuths[j], elevations[i]};
}

CMatrix ratio_matrix(const GainSeries& series, const AzEl& ap_dir, const RisPanel& panel,
                     double wavelength) {
  if (series.configs.size() != series.gains.size()) {
    throw InsufficientSoundings("gain series and phase configurations differ in length");
  }
  std::vector<int> present;
  for (int b = 0; b < static_cast<int>(series.gains.size()); ++b) {
    if (series.gains[b]) present.push_back(b);
  }
  if (present.size() < 2) {
    throw InsufficientSoundings("surface " + std::to_string(series.ris_index) + " has " +
                                std::to_string(present.size()) + " matched soundings, need 2");
  }

  const CVector a_ap_conj = ris_steering(panel, ap_dir, wavelength).conjugate();
  const int ref = present.front();
  const Complex g_ref = *series.gains[ref];
  const CVector& xi_ref = series.configs[ref];

  CMatrix a(static_cast<Eigen::Index>(present.size()) - 1, panel.grid.size());
  for (std::size_t row = 1; row < present.size(); ++row) {
    const int b = present[row];
    const CVector mixed = g_ref * series.configs[b] - *series.gains[b] * xi_ref;
    a.row(static_cast<Eigen::Index>(row) - 1) = a_ap_conj.cwiseProduct(mixed).transpose();
  }
  return a;
}

CMatrix subspace_basis(const CMatrix& a, std::optional<int> max_dim) {
  const Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv[0] > 0.0)) {
    throw DegenerateSubspace("ratio matrix is zero");
  }
  int rank = 0;
  while (rank < sv.size() && sv[rank] > kRankTolerance * sv[0]) ++rank;
  if (max_dim) rank = std::min(rank, *max_dim);
  return svd.matrixV().leftCols(rank);
}

SpectrumGrid pseudo_spectrum(const CMatrix& u, const RisPanel& panel, double wavelength, int n) {
  const PanelFrame& frame = panel.frame;
  const double step = kPi / (2.0 * n);

  SpectrumGrid grid;
  grid.samples_per_half_pi = n;
  if (std::abs(frame.normal.z()) < 1e-12) {
    const double start = std::atan2(frame.normal.y(), frame.normal.x()) - kPi / 2.0;
    for (int j = 0; j <= 2 * n; ++j) grid.azimuths.push_back(start + j * step);
  } else {
    for (int j = 0; j < 4 * n; ++j) grid.azimuths.push_back(-kPi + (j + 1) * step);
  }
  for (int i = 0; i <= 2 * n; ++i) grid.elevations.push_back(i * step);
  grid.values.resize(static_cast<Eigen::Index>(grid.elevations.size()),
                     static_cast<Eigen::Index>(grid.azimuths.size()));

  const double ku = kTwoPi * panel.grid.dx / wavelength;
  const double kv = kTwoPi * panel.grid.dy / wavelength;

  // The row-fixed axis must be the vertical one so that its phase depends on elevation only.
  const bool swap = is_vertical(frame.axis_u) && !is_vertical(frame.axis_v);
  const bool rows_separable = swap || is_vertical(frame.axis_v);
  const SubspaceEnergy energy =
      swap ? SubspaceEnergy(swap_axes(u, panel.grid.nx, panel.grid.ny), panel.grid.ny, panel.grid.nx)
           : SubspaceEnergy(u, panel.grid.nx, panel.grid.ny);
  const Vec3& row_axis = swap ? frame.axis_u : frame.axis_v;
  const Vec3& col_axis = swap ? frame.axis_v : frame.axis_u;
  const double k_row = swap ? ku : kv;
  const double k_col = swap ? kv : ku;

  std::vector<double> cos_az(grid.azimuths.size()), sin_az(grid.azimuths.size());
  for (std::size_t j = 0; j < grid.azimuths.size(); ++j) {
    cos_az[j] = std::cos(grid.azimuths[j]);
    sin_az[j] = std::sin(grid.azimuths[j]);
  }

  std::vector<Complex> d;
  for (std::size_t i = 0; i < grid.elevations.size(); ++i) {
    const double st = std::sin(grid.elevations[i]);
    const double ct = std::cos(grid.elevations[i]);
    if (rows_separable) energy.fix_beta(k_row * row_axis.z() * ct, d);
    for (std::size_t j = 0; j < grid.azimuths.size(); ++j) {
      const Vec3 dir(cos_az[j] * st, sin_az[j] * st, ct);
      if (!rows_separable) energy.fix_beta(k_row * dir.dot(row_axis), d);
      const double f = energy.eval(d, k_col * dir.dot(col_axis));
      grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          1.0 / std::max(f, kSpectrumFloor);
    }
  }
  return grid;
}

RisAoaResult estimate_ris_aoa_detailed(const GainSeries& series, const AzEl& ap_dir,
                                       const RisPanel& panel, double wavelength, int n,
                                       const AoaOptions& options) {
  const CMatrix a = ratio_matrix(series, ap_dir, panel, wavelength);
  const int elements = panel.grid.size();
  std::optional<int> cap;
  if (a.rows() >= elements) {
    if (!options.truncate_subspace) {
      throw DegenerateSubspace("B - 1 = " + std::to_string(a.rows()) +
                               " ratio rows fill all " + std::to_string(elements) +
                               " surface dimensions");
    }
    cap = elements - 1;
  }
  const CMatrix u = subspace_basis(a, cap);
  if (u.cols() >= elements) throw DegenerateSubspace("signal subspace spans every direction");

  RisAoaResult out;
  out.subspace_dim = static_cast<int>(u.cols());
  out.spectrum = pseudo_spectrum(u, panel, wavelength, n);

  Eigen::Index i = 0, j = 0;
  out.spectrum.values.maxCoeff(&i, &j);
  out.aoa = {out.spectrum.azimuths[j], out.spectrum.elevations[i]};
  if (options.interpolate) {
    const auto& v = out.spectrum.values;
    const double step = kPi / (2.0 * n);
    if (j > 0 && j + 1 < v.cols()) {
      out.aoa.azimuth += step * parabolic_offset(v(i, j - 1), v(i, j), v(i, j + 1));
    }
    if (i > 0 && i + 1 < v.rows()) {
      out.aoa.elevation += step * parabolic_offset(v(i - 1, j), v(i, j), v(i + 1, j));
    }
  }

  const CVector a_r = ris_steering(panel, out.aoa, wavelength);
  const Eigen::VectorXd res = (a * a_r).cwiseAbs();
  out.row_residuals.assign(res.data(), res.data() + res.size());
  return out;
}

AzEl estimate_ris_aoa(const GainSeries& series, const AzEl& ap_dir, const RisPanel& panel,
                      double wavelength, int n, const AoaOptions& options) {
  return estimate_ris_aoa_detailed(series, ap_dir, panel, wavelength, n, options).aoa;
}

}  // namespace risloc
