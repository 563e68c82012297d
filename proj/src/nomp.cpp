#include "risloc/nomp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace risloc {

namespace {

// Projection S = a^H r and its partial derivatives in (omega, psi).
struct Projection {
  Complex s, s_w, s_p, s_ww, s_pp, s_wp;
};

// Objective J = |S|^2 / M with gradient and Hessian.
struct Objective {
  double value = 0.0;
  double g_w = 0.0, g_p = 0.0;
  double h_ww = 0.0, h_pp = 0.0, h_wp = 0.0;
  Complex s;
};

Projection project(const CVector& r, const NormalizedAoa& aoa, const ArrayGrid& shape,
                   bool derivatives) {
  const int nx = shape.nx;
  const int ny = shape.ny;
  std::vector<Complex> ey(ny);
  for (int n = 0; n < ny; ++n) ey[n] = std::polar(1.0, -n * aoa.psi);
  Projection out{};
  for (int m = 0; m < nx; ++m) {
    Complex t0, t1, t2;
    for (int n = 0; n < ny; ++n) {
      const Complex term = ey[n] * r[m * ny + n];
      t0 += term;
      if (derivatives) {
        t1 += Complex(0.0, -n) * term;
        t2 += -static_cast<double>(n * n) * term;
      }
    }
    const Complex ex = std::polar(1.0, -m * aoa.omega);
    out.s += ex * t0;
    if (derivatives) {
      const Complex jm(0.0, -m);
      out.s_w += jm * ex * t0;
      out.s_ww += -static_cast<double>(m * m) * ex * t0;
      out.s_p += ex * t1;
      out.s_pp += ex * t2;
      out.s_wp += jm * ex * t1;
    }
  }
  return out;
}

Objective evaluate(const CVector& r, const NormalizedAoa& aoa, const ArrayGrid& shape) {
  const Projection p = project(r, aoa, shape, true);
  const double inv_m = 1.0 / shape.size();
  Objective o;
  o.s = p.s;
  o.value = std::norm(p.s) * inv_m;
  o.g_w = 2.0 * std::real(std::conj(p.s) * p.s_w) * inv_m;
  o.g_p = 2.0 * std::real(std::conj(p.s) * p.s_p) * inv_m;
  o.h_ww = 2.0 * (std::norm(p.s_w) + std::real(std::conj(p.s) * p.s_ww)) * inv_m;
  o.h_pp = 2.0 * (std::norm(p.s_p) + std::real(std::conj(p.s) * p.s_pp)) * inv_m;
  o.h_wp = 2.0 * std::real(std::conj(p.s_p) * p.s_w + std::conj(p.s) * p.s_wp) * inv_m;
  return o;
}

NormalizedAoa shifted(const NormalizedAoa& aoa, double dw, double dp) {
  return {wrap_2pi(aoa.omega + dw), wrap_2pi(aoa.psi + dp)};
}

constexpr int kMaxHalvings = 10;

}  // namespace

CVector residual(const CVector& h, const std::vector<ExtractedPath>& paths,
                 const ArrayGrid& shape) {
  CVector r = h;
  for (const auto& p : paths) r -= p.gain * steering_vector(p.aoa, shape.nx, shape.ny);
  return r;
}

double projection_energy(const CVector& r, const NormalizedAoa& aoa, const ArrayGrid& shape) {
  return std::norm(project(r, aoa, shape, false).s) / shape.size();
}

Detection coarse_detect(const CVector& r, const ArrayGrid& shape, int oversampling) {
  const int nx = shape.nx;
  const int ny = shape.ny;
  const int gx = oversampling * nx;
  const int gy = oversampling * ny;

  // Twiddles are built from integer residues so on-grid directions are hit exactly.
  auto twiddle = [](int k, int size) { return std::polar(1.0, -kTwoPi * k / size); };

  // partial(i, n) = sum_m exp(-j m omega_i) r(m, n)
  CMatrix partial = CMatrix::Zero(gx, ny);
  for (int i = 0; i < gx; ++i) {
    for (int m = 0; m < nx; ++m) {
      const Complex w = twiddle((m * i) % gx, gx);
      partial.row(i) += w * r.segment(static_cast<Eigen::Index>(m) * ny, ny).transpose();
    }
  }
  CMatrix psi_twiddle(ny, gy);
  for (int n = 0; n < ny; ++n) {
    for (int k = 0; k < gy; ++k) psi_twiddle(n, k) = twiddle((n * k) % gy, gy);
  }
  const CMatrix s = partial * psi_twiddle;

  Eigen::Index bi = 0, bk = 0;
  s.cwiseAbs2().maxCoeff(&bi, &bk);
  const double inv_m = 1.0 / shape.size();
  Detection d;
  d.path.aoa = {kTwoPi * bi / gx, kTwoPi * bk / gy};
  d.path.gain = s(bi, bk) * inv_m;
  d.objective = std::norm(s(bi, bk)) * inv_m;
  return d;
}

ExtractedPath newton_refine(const CVector& r_plus, const ExtractedPath& path,
                            const ArrayGrid& shape, int rounds, int oversampling) {
  if (rounds <= 0) return path;
  const double cell = kTwoPi / (std::max(1, oversampling) * std::max(shape.nx, shape.ny));

  NormalizedAoa x = path.aoa;
  Objective obj = evaluate(r_plus, x, shape);
  for (int round = 0; round < rounds; ++round) {
    bool accepted = false;
    NormalizedAoa candidate = x;

    const double det = obj.h_ww * obj.h_pp - obj.h_wp * obj.h_wp;
    if (obj.h_ww < 0.0 && det > 0.0) {
      const double dw = -(obj.h_pp * obj.g_w - obj.h_wp * obj.g_p) / det;
      const double dp = -(-obj.h_wp * obj.g_w + obj.h_ww * obj.g_p) / det;
      candidate = shifted(x, dw, dp);
      accepted = projection_energy(r_plus, candidate, shape) >= obj.value;
    }
    if (!accepted) {
      const double gnorm = std::hypot(obj.g_w, obj.g_p);
      if (gnorm > 0.0) {
        double step = cell / 4.0;
        for (int k = 0; k <= kMaxHalvings && !accepted; ++k, step /= 2.0) {
          candidate = shifted(x, step * obj.g_w / gnorm, step * obj.g_p / gnorm);
          accepted = projection_energy(r_plus, candidate, shape) > obj.value;
        }
      }
    }
    if (!accepted) break;
    x = candidate;
    obj = evaluate(r_plus, x, shape);
  }
  return {obj.s / static_cast<double>(shape.size()), x};
}

bool refit_gains(const CVector& h, std::vector<ExtractedPath>& paths, const ArrayGrid& shape) {
  const auto k = static_cast<Eigen::Index>(paths.size());
  if (k == 0) return true;
  CMatrix a(h.size(), k);
  for (Eigen::Index i = 0; i < k; ++i) a.col(i) = steering_vector(paths[i].aoa, shape.nx, shape.ny);

  const CMatrix gram = a.adjoint() * a;
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  if (!(ev.minCoeff() > 1e-12 * ev.maxCoeff())) return false;

  const CVector g = a.householderQr().solve(h);
  for (Eigen::Index i = 0; i < k; ++i) paths[i].gain = g[i];
  return true;
}

ExtractedPathSet cyclic_refine(const CVector& h, const ExtractedPathSet& paths,
                               const ArrayGrid& shape, int rounds, int oversampling) {
  ExtractedPathSet out = paths;
  if (rounds <= 0) return out;

  CVector r = residual(h, out.paths, shape);
  for (int round = 0; round < rounds; ++round) {
    for (auto& p : out.paths) {
      const CVector r_plus = r + p.gain * steering_vector(p.aoa, shape.nx, shape.ny);
      p = newton_refine(r_plus, p, shape, 1, oversampling);
      r = r_plus - p.gain * steering_vector(p.aoa, shape.nx, shape.ny);
    }
    std::vector<ExtractedPath> refit = out.paths;
    if (refit_gains(h, refit, shape)) {
      CVector r_refit = residual(h, refit, shape);
      // The LS solution is optimal; the comparison only absorbs rounding.
      if (r_refit.squaredNorm() <= r.squaredNorm()) {
        out.paths = std::move(refit);
        r = std::move(r_refit);
      }
    }
  }
  out.residual_energy = r.squaredNorm();
  return out;
}

ExtractedPathSet nomp_extract(const CVector& h, const ArrayGrid& shape, const NompConfig& cfg) {
  auto below_threshold = [&](double energy) {
    const double measure =
        cfg.energy_rule == EnergyRule::total ? energy : energy / static_cast<double>(shape.size());
    return measure < cfg.energy_threshold_w;
  };

  ExtractedPathSet set;
  CVector r = h;
  double energy = r.squaredNorm();
  set.energy_trace.push_back(energy);

  while (static_cast<int>(set.paths.size()) < cfg.max_paths && !below_threshold(energy)) {
    const ExtractedPathSet before = set;
    const Detection det = coarse_detect(r, shape, cfg.oversampling);
    set.paths.push_back(newton_refine(r, det.path, shape, cfg.single_rounds, cfg.oversampling));
    set = cyclic_refine(h, set, shape, cfg.cyclic_rounds, cfg.oversampling);
    r = residual(h, set.paths, shape);
    const double next = r.squaredNorm();
    if (!(next < energy)) {
      // No further energy can be explained; keep the previous estimate.
      set = before;
      r = residual(h, set.paths, shape);
      break;
    }
    energy = next;
    set.energy_trace.push_back(energy);
  }
  set.residual_energy = r.squaredNorm();
  return set;
}

}  // namespace risloc
