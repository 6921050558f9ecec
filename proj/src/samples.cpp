#include "gaplab/samples.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace gaplab {

namespace {

constexpr Complex kI{0.0, 1.0};

// (exp(i t) - 1) / (i t), safe at t = 0
Complex phase_sinc(double t) {
  if (std::abs(t) < 1e-8) return Complex(1.0 - t * t / 6.0, 0.5 * t);
  return (std::exp(kI * t) - 1.0) / (kI * t);
}

// transverse-gauge potential A_lambda(x) = (int_0^1 s lambda B(lambda s x) ds) (-x2, x1)
Point2 transverse_potential(const FieldProfile& field, double lambda, const Point2& x) {
  double radial = 0.5 * lambda * field.mean;
  for (const auto& h : field.harmonics) {
    double c = kTwoPi * lambda * (h.n1 * x.x() + h.n2 * x.y());
    // int_0^1 s trig(c s) ds
    double integral;
    if (std::abs(c) < 1e-6) {
      integral = h.use_sin ? c / 3.0 : 0.5 - c * c / 8.0;
    } else if (h.use_sin) {
      integral = (std::sin(c) - c * std::cos(c)) / (c * c);
    } else {
      integral = (std::cos(c) + c * std::sin(c) - 1.0) / (c * c);
    }
    radial += lambda * h.amplitude * integral;
  }
  return radial * Point2(-x.y(), x.x());
}

}  // namespace

double perturbation_line_integral(const FieldProfile& field, double lambda,
                                  const Point2& a, const Point2& c) {
  if (lambda == 0.0) return 0.0;
  // 20-point Gauss-Legendre on [0,1]; integrand is analytic with scale
  // lambda*|x| <~ O(1) so this is converged to machine precision for the
  // unit-length edges we use
  static const double xs[10] = {0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
                                0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
                                0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
                                0.9931285991850949};
  static const double ws[10] = {0.1527533871307258, 0.1491729864726037, 0.1420961093183820,
                                0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
                                0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
                                0.0176140071391521};
  const Point2 d = c - a;
  double acc = 0.0;
  for (int i = 0; i < 10; ++i) {
    for (double sgn : {-1.0, 1.0}) {
      double t = 0.5 * (1.0 + sgn * xs[i]);
      acc += 0.5 * ws[i] * transverse_potential(field, lambda, a + t * d).dot(d);
    }
  }
  return acc;
}

double plaquette_flux(const FieldProfile& field, double lambda, double g1, double g2) {
  if (lambda == 0.0) return 0.0;
  double flux = lambda * field.mean;
  for (const auto& h : field.harmonics) {
    double u = kTwoPi * lambda * h.n1;
    double v = kTwoPi * lambda * h.n2;
    Complex cell = std::exp(kI * (u * g1 + v * g2)) * phase_sinc(u) * phase_sinc(v);
    flux += lambda * h.amplitude * (h.use_sin ? cell.imag() : cell.real());
  }
  return flux;
}

double total_perturbing_flux(const FieldProfile& field, double lambda, int L) {
  if (lambda == 0.0) return 0.0;
  double flux = lambda * field.mean * L * L;
  for (const auto& h : field.harmonics) {
    double u = kTwoPi * lambda * h.n1;
    double v = kTwoPi * lambda * h.n2;
    Complex cell = static_cast<double>(L) * static_cast<double>(L) * phase_sinc(u * L) *
                   phase_sinc(v * L);
    flux += lambda * h.amplitude * (h.use_sin ? cell.imag() : cell.real());
  }
  return flux;
}

double admissible_lambda(const FieldProfile& field, double lambda, int L) {
  double target = kTwoPi * std::round(total_perturbing_flux(field, lambda, L) / kTwoPi);
  double x = lambda;
  for (int it = 0; it < 64; ++it) {
    double f = total_perturbing_flux(field, x, L) - target;
    if (std::abs(f) < 1e-12) return x;
    double step = 1e-7 * std::max(1.0, std::abs(x));
    double df = (total_perturbing_flux(field, x + step, L) -
                 total_perturbing_flux(field, x - step, L)) /
                (2.0 * step);
    if (std::abs(df) < 1e-14) break;
    x -= f / df;
  }
  throw std::runtime_error("admissible_lambda: Newton iteration failed");
}

Eigen::Index SampleOperator::site_index(std::int64_t g1, std::int64_t g2) const {
  std::int64_t a = g1 - lo.x(), c = g2 - lo.y();
  if (geometry == Geometry::Torus) {
    a = ((a % L) + L) % L;
    c = ((c % L) + L) % L;
  } else if (a < 0 || a >= L || c < 0 || c >= L) {
    throw std::out_of_range("SampleOperator: site outside patch");
  }
  return static_cast<Eigen::Index>(c) * L + a;
}

Point2 SampleOperator::site(Eigen::Index idx) const {
  return {static_cast<double>(lo.x() + (idx % L)), static_cast<double>(lo.y() + (idx / L))};
}

SampleOperator sample_hamiltonian(int L, const RationalFlux& flux, double lambda,
                                  const FieldProfile& field, const PotentialSpec& V,
                                  Geometry geometry, Eigen::Vector2i lo) {
  if (L < 2 * flux.q)
    throw std::invalid_argument("sample_hamiltonian: need L >= 2q");
  field.validate();
  const double b = flux.b();

  SampleOperator s;
  s.geometry = geometry;
  s.L = L;
  s.lo = lo;
  s.flux = flux;
  s.lambda = lambda;
  s.field = field;
  s.V = V;

  const bool torus = geometry == Geometry::Torus;
  if (torus) {
    // constant part: b L^2 = 2 pi p L^2 / q must be an integer multiple of 2 pi
    if ((static_cast<std::int64_t>(L) * L) % flux.q != 0)
      throw std::invalid_argument("sample_hamiltonian: torus flux b*L^2 not in 2*pi*Z (q must divide L^2)");
    if (lambda != 0.0) {
      double quanta = total_perturbing_flux(field, lambda, L) / kTwoPi;
      if (std::abs(quanta - std::round(quanta)) > 1e-9)
        throw std::invalid_argument(
            "sample_hamiltonian: non-admissible torus perturbing flux; nearest admissible lambda = " +
            std::to_string(admissible_lambda(field, lambda, L)));
    }
  }

  const auto in_cell = [&](std::int64_t a) { return a >= 0 && a < L; };

  // lambda link phases, canonical orientation: [0]: (g -> g+e1), [1]: (g -> g+e2),
  // indexed by the site index of g.  Interior edges carry the exact transverse
  // gauge line integral; torus seam edges are then fixed so that every
  // plaquette (seams included) carries the exact perturbing flux.
  Eigen::ArrayXXd lam(L * L, 2);
  lam.setZero();
  const auto eidx = [&](std::int64_t a, std::int64_t c) { return c * L + a; };
  if (lambda != 0.0) {
    for (std::int64_t c = 0; c < L; ++c)
      for (std::int64_t a = 0; a < L; ++a) {
        Point2 g(static_cast<double>(lo.x() + a), static_cast<double>(lo.y() + c));
        if (a + 1 < L || !torus)
          lam(eidx(a, c), 0) = (a + 1 < L)
              ? perturbation_line_integral(field, lambda, g, g + Point2(1, 0))
              : 0.0;
        if (c + 1 < L || !torus)
          lam(eidx(a, c), 1) = (c + 1 < L)
              ? perturbation_line_integral(field, lambda, g, g + Point2(0, 1))
              : 0.0;
      }
    if (torus) {
      const auto F = [&](std::int64_t a, std::int64_t c) {
        return plaquette_flux(field, lambda, lo.x() + a, lo.y() + c);
      };
      // top-row seam (edges (a, L-1) -> (a, 0)): plaquette at (a, L-1) reads
      //   lam1(a,L-1) + lam2(a+1,L-1) - lam1(a,0) - lam2(a,L-1) = F(a,L-1)
      lam(eidx(0, L - 1), 1) = 0.0;
      for (std::int64_t a = 0; a + 1 < L; ++a)
        lam(eidx(a + 1, L - 1), 1) = lam(eidx(a, L - 1), 1) + F(a, L - 1) +
                                     lam(eidx(a, 0), 0) - lam(eidx(a, L - 1), 0);
      // right-column seam (edges (L-1, c) -> (0, c)): plaquette at (L-1, c) reads
      //   lam1(L-1,c) + lam2(0,c) - lam1(L-1,c+1) - lam2(L-1,c) = F(L-1,c)
      lam(eidx(L - 1, 0), 0) = 0.0;
      for (std::int64_t c = 0; c + 1 < L; ++c)
        lam(eidx(L - 1, c + 1), 0) = lam(eidx(L - 1, c), 0) + lam(eidx(0, c), 1) -
                                     lam(eidx(L - 1, c), 1) - F(L - 1, c);
    }
  }

  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<std::size_t>(L) * L * 5);

  for (std::int64_t c = 0; c < L; ++c) {
    for (std::int64_t a = 0; a < L; ++a) {
      const Eigen::Index row = eidx(a, c);
      const Point2 g(static_cast<double>(lo.x() + a), static_cast<double>(lo.y() + c));
      trip.emplace_back(row, row, Complex(V.eval_lattice(lo.x() + a, lo.y() + c), 0.0));
      // directed edges g -> g+e_mu; the Hermitian partner is added explicitly
      for (int mu = 0; mu < 2; ++mu) {
        std::int64_t a2 = a + (mu == 0 ? 1 : 0), c2 = c + (mu == 1 ? 1 : 0);
        double theta_lambda = lam(row, mu);
        double theta_b;
        Eigen::Index col;
        if (in_cell(a2) && in_cell(c2)) {
          const Point2 p(static_cast<double>(lo.x() + a2), static_cast<double>(lo.y() + c2));
          theta_b = peierls_phase(p, g, b);  // H(p, g) = exp(i b phi(p, g))
          col = eidx(a2, c2);
        } else if (torus) {
          const Point2 p(static_cast<double>(lo.x() + a2), static_cast<double>(lo.y() + c2));
          // fold with the translation-invariance phase psi(p) = e^{i b phi(p,w)} psi(p-w);
          // the (p_f, g) element is the conjugate of H(g, p) e^{i b phi(p,w)}
          const double w1 = (a2 >= L) ? L : 0.0, w2 = (c2 >= L) ? L : 0.0;
          theta_b = peierls_phase(p, g, b) - peierls_phase(p, Point2(w1, w2), b);
          col = eidx(a2 % L, c2 % L);
        } else {
          continue;  // patch boundary
        }
        const Complex hop = std::exp(kI * (theta_b + theta_lambda));
        trip.emplace_back(col, row, hop);
        trip.emplace_back(row, col, std::conj(hop));
      }
    }
  }

  s.H.resize(s.dim(), s.dim());
  s.H.setFromTriplets(trip.begin(), trip.end());
  return s;
}

Matrix magnetic_translation(const SampleOperator& sample, const Eigen::Vector2i& eta,
                            bool modified) {
  if (sample.lambda != 0.0)
    throw std::invalid_argument("magnetic_translation: only defined for lambda = 0 samples");
  const double b = sample.flux.b();
  const int L = sample.L;
  Matrix t = Matrix::Zero(sample.dim(), sample.dim());
  const double cocycle = modified ? 0.5 * b * eta.x() * eta.y() : 0.0;
  for (Eigen::Index idx = 0; idx < sample.dim(); ++idx) {
    const Point2 x = sample.site(idx);
    Point2 p = x - Point2(eta.x(), eta.y());
    double phase = cocycle + peierls_phase(x, Point2(eta.x(), eta.y()), b);
    if (sample.geometry == Geometry::Torus) {
      // fold p back into the cell one axis at a time, collecting
      // psi(p) = e^{i b phi(p, w)} psi(p - w)
      for (int axis = 0; axis < 2; ++axis) {
        double low = sample.lo(axis), high = low + L;
        double w = 0.0;
        while (p(axis) < low) {
          p(axis) += L;
          w -= L;
        }
        while (p(axis) >= high) {
          p(axis) -= L;
          w += L;
        }
        if (w != 0.0) {
          Point2 wv = Point2::Zero();
          wv(axis) = w;
          Point2 unfolded = p;
          unfolded(axis) += w;
          phase += peierls_phase(unfolded, wv, b);
        }
      }
    } else {
      if (p.x() < sample.lo.x() || p.x() >= sample.lo.x() + L || p.y() < sample.lo.y() ||
          p.y() >= sample.lo.y() + L)
        continue;  // translated off the patch
    }
    t(idx, sample.site_index(static_cast<std::int64_t>(p.x()),
                             static_cast<std::int64_t>(p.y()))) = std::exp(kI * phase);
  }
  return t;
}

}  // namespace gaplab
