#include "gaplab/flux.hpp"

#include <cmath>
#include <stdexcept>

namespace gaplab {

RationalFlux::RationalFlux(std::int64_t p_, std::int64_t q_) {
  if (q_ < 1) throw std::invalid_argument("RationalFlux: q must be >= 1");
  std::int64_t g = gcd64(p_, q_);
  if (g == 0) g = 1;
  p = p_ / g;
  q = q_ / g;
}

double peierls_phase(const Point2& x, const Point2& xp, double b) {
  return 0.5 * b * (xp.x() * x.y() - xp.y() * x.x());
}

double composition_defect(const Point2& x, const Point2& y, const Point2& xp) {
  return peierls_phase(x, y, 1.0) + peierls_phase(y, xp, 1.0) - peierls_phase(x, xp, 1.0);
}

FieldProfile FieldProfile::constant(double b0) {
  FieldProfile f;
  f.mean = b0;
  return f;
}

double FieldProfile::eval(const Point2& x) const {
  double v = mean;
  for (const auto& h : harmonics) {
    double arg = kTwoPi * (h.n1 * x.x() + h.n2 * x.y());
    v += h.amplitude * (h.use_sin ? std::sin(arg) : std::cos(arg));
  }
  return v;
}

double FieldProfile::lipschitz_bound() const {
  double k = 0.0;
  for (const auto& h : harmonics)
    k += std::abs(h.amplitude) * kTwoPi * std::hypot(double(h.n1), double(h.n2));
  return k;
}

void FieldProfile::validate() const {
  for (const auto& h : harmonics)
    if (h.n1 == 0 && h.n2 == 0)
      throw std::invalid_argument(
          "FieldProfile: harmonic with zero wavevector would shift the mean; "
          "fold it into `mean` instead");
}

namespace {

struct TriQuad {
  const FieldProfile& field;
  double lambda;
  int evals = 0;

  double integrand(const Point2& u) const { return lambda * field.eval(lambda * u); }

  // signed area of (a,b,c), counterclockwise positive
  static double signed_area(const Point2& a, const Point2& b, const Point2& c) {
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
  }

  // three-point edge-midpoint rule, exact for quadratics
  double rule(const Point2& a, const Point2& b, const Point2& c, double area) const {
    Point2 mab = 0.5 * (a + b), mbc = 0.5 * (b + c), mca = 0.5 * (c + a);
    return area * (integrand(mab) + integrand(mbc) + integrand(mca)) / 3.0;
  }

  double recurse(const Point2& a, const Point2& b, const Point2& c, double area,
                 double coarse, double tol, int depth) {
    Point2 mab = 0.5 * (a + b), mbc = 0.5 * (b + c), mca = 0.5 * (c + a);
    double a4 = 0.25 * area;
    double s1 = rule(a, mab, mca, a4);
    double s2 = rule(mab, b, mbc, a4);
    double s3 = rule(mca, mbc, c, a4);
    double s4 = rule(mab, mbc, mca, a4);
    double fine = s1 + s2 + s3 + s4;
    if (std::abs(fine - coarse) <= tol || depth >= 24)
      return fine;
    double t4 = 0.25 * tol;
    return recurse(a, mab, mca, a4, s1, t4, depth + 1) +
           recurse(mab, b, mbc, a4, s2, t4, depth + 1) +
           recurse(mca, mbc, c, a4, s3, t4, depth + 1) +
           recurse(mab, mbc, mca, a4, s4, t4, depth + 1);
  }
};

}  // namespace

double triangle_flux(const Point2& x, const Point2& y, const Point2& xp,
                     const FieldProfile& field, double lambda, double rel_tol) {
  if (lambda < 0) throw std::invalid_argument("triangle_flux: lambda must be >= 0");
  field.validate();
  double area = TriQuad::signed_area(x, y, xp);
  if (lambda == 0.0 || area == 0.0) return 0.0;
  if (field.is_constant()) return lambda * field.mean * area;

  TriQuad quad{field, lambda};
  double coarse = quad.rule(x, y, xp, area);
  double scale = std::abs(lambda) * (std::abs(field.mean) + 1.0) * std::abs(area);
  double tol = rel_tol * std::max(std::abs(coarse), scale);
  double result = quad.recurse(x, y, xp, area, coarse, tol, 0);
  if (!std::isfinite(result))
    throw std::runtime_error("triangle_flux: quadrature did not converge to tolerance " +
                             std::to_string(tol));
  return result;
}

std::vector<RationalFlux> farey_fluxes(std::int64_t qmax) {
  if (qmax < 1) throw std::invalid_argument("farey_fluxes: qmax must be >= 1");
  std::vector<RationalFlux> out;
  // standard next-term recurrence for the Farey sequence F_qmax
  std::int64_t a = 0, b = 1, c = 1, d = qmax;
  out.emplace_back(a, b);
  while (c <= qmax) {
    std::int64_t k = (qmax + b) / d;
    std::int64_t a2 = k * c - a, b2 = k * d - b;
    a = c;
    b = d;
    c = a2;
    d = b2;
    out.emplace_back(a, b);
  }
  return out;
}

}  // namespace gaplab
