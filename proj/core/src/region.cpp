#include "liesync/region.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "liesync/errors.hpp"

namespace liesync::region {

namespace {

const double kPi = std::numbers::pi;

struct Geometry {
  int n;
  double omega3;     // height of the horizontal locus: (1/2) cot(pi/2N)
  double slope;      // cot(pi/N)
  double sigma23;    // loci 2/3 intersection
  double sigma34;    // loci 3/4 intersection
  double sigma25;    // loci 2/5 intersection (nontrivial root)
  double sigma35;    // loci 3/5 intersection
  double sigma13;    // loci 1/3 intersection
  double sigma14;    // loci 1/4 intersection (nontrivial root)
};

Geometry geometry(int n) {
  Geometry g;
  g.n = n;
  const double nd = n;
  g.omega3 = 0.5 / std::tan(kPi / (2.0 * nd));
  g.slope = 1.0 / std::tan(kPi / nd);
  const double sec = 1.0 / std::cos(kPi / nd);
  g.sigma23 = 0.5 * (1.0 + sec);
  g.sigma34 = nd - g.sigma23;
  g.sigma25 = (nd - 1.0) * (1.0 - std::cos(2.0 * kPi / nd));
  const double disc = std::sqrt(std::max(0.0, (nd - 1.0) * (nd - 1.0) - g.omega3 * g.omega3));
  g.sigma35 = nd - 1.0 - disc;
  g.sigma13 = 1.0 + disc;
  g.sigma14 = (nd - 1.0) * std::cos(2.0 * kPi / nd) + 1.0;
  return g;
}

double circle_upper(double center, double radius, double sigma) {
  const double d = radius * radius - (sigma - center) * (sigma - center);
  return d <= 0.0 ? 0.0 : std::sqrt(d);
}

/// Height of locus `id` above sigma (upper half plane).
double locus_omega(const Geometry& geo, int id, double sigma) {
  const double nd = geo.n;
  switch (id) {
    case 1: return circle_upper(1.0, nd - 1.0, sigma);
    case 2: return geo.slope * sigma;
    case 3: return geo.omega3;
    case 4: return geo.slope * (nd - sigma);
    case 5: return circle_upper(nd - 1.0, nd - 1.0, sigma);
  }
  throw DomainError("locus_omega: locus id must be 1..5");
}

struct Segment {
  int locus;
  double lo, hi;
};

std::vector<Segment> active_segments(const Geometry& geo) {
  const double nd = geo.n;
  if (geo.n == 3) {
    return {{2, 0.0, nd / 2.0}, {4, nd / 2.0, nd}};
  }
  if (geo.n <= 18) {
    return {{2, 0.0, geo.sigma23}, {3, geo.sigma23, geo.sigma34}, {4, geo.sigma34, nd}};
  }
  return {{2, 0.0, geo.sigma25},
          {5, geo.sigma25, geo.sigma35},
          {3, geo.sigma35, geo.sigma13},
          {1, geo.sigma13, geo.sigma14},
          {4, geo.sigma14, nd}};
}

/// Golden-section maximization on [a, b].
double golden_max(const std::function<double(double)>& f, double a, double b, double* arg) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + phi * (b - a); f2 = f(x2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - phi * (b - a); f1 = f(x1);
    }
  }
  const double xm = 0.5 * (a + b);
  const double fm = f(xm);
  if (arg) *arg = xm;
  return fm;
}

}  // namespace

double gain_of_point(double sigma, double omega) {
  if (sigma == 0.0) return 0.0;
  return (sigma * sigma + omega * omega) / (2.0 * sigma);
}

std::vector<RegionPoint> region_boundary(int n, int samples) {
  if (n < 3) throw DomainError("region_boundary: N >= 3 required");
  if (samples < 100) throw DomainError("region_boundary: at least 100 samples required");
  const Geometry geo = geometry(n);
  const auto segments = active_segments(geo);

  double total = 0.0;
  for (const Segment& s : segments) total += s.hi - s.lo;

  std::vector<RegionPoint> points;
  points.reserve(static_cast<std::size_t>(samples) + 2 * segments.size());
  for (const Segment& s : segments) {
    const int count =
        std::max(2, static_cast<int>(std::lround(samples * (s.hi - s.lo) / total)));
    for (int i = 0; i < count; ++i) {
      const double sigma = s.lo + (s.hi - s.lo) * i / (count - 1);
      const double omega = locus_omega(geo, s.locus, sigma);
      points.push_back({sigma, omega, s.locus, gain_of_point(sigma, omega)});
    }
  }
  return points;
}

bool point_in_region(int n, Complex v, double tol) {
  if (n < 3) throw DomainError("point_in_region: N >= 3 required");
  const Geometry geo = geometry(n);
  const double sigma = v.real();
  const double omega = std::abs(v.imag());
  if (sigma < -tol || sigma > n + tol) return false;
  const double s = std::clamp(sigma, 0.0, static_cast<double>(n));
  for (int id = 1; id <= 5; ++id) {
    if (omega > locus_omega(geo, id, s) + tol) return false;
  }
  return true;
}

RegionMaximum region_maximum(int n, int samples_per_segment) {
  if (n < 3) throw DomainError("region_maximum: N >= 3 required");
  if (samples_per_segment < 100) {
    throw DomainError("region_maximum: at least 100 samples per segment required");
  }
  const Geometry geo = geometry(n);
  const auto segments = active_segments(geo);

  RegionMaximum best;
  best.value = -1.0;
  for (const Segment& seg : segments) {
    const auto g_on_locus = [&](double sigma) {
      return gain_of_point(sigma, locus_omega(geo, seg.locus, sigma));
    };
    // Dense scan (endpoints included), then local golden-section refinement
    // around the best sample.
    int best_i = 0;
    double best_v = -1.0;
    const int count = samples_per_segment;
    for (int i = 0; i < count; ++i) {
      const double sigma = seg.lo + (seg.hi - seg.lo) * i / (count - 1);
      const double v = g_on_locus(sigma);
      if (v > best_v) {
        best_v = v;
        best_i = i;
      }
    }
    const double step = (seg.hi - seg.lo) / (count - 1);
    const double lo = std::max(seg.lo, seg.lo + (best_i - 1) * step);
    const double hi = std::min(seg.hi, seg.lo + (best_i + 1) * step);
    double arg = 0.0;
    double refined = golden_max(g_on_locus, lo, hi, &arg);
    if (best_v > refined) {
      refined = best_v;
      arg = seg.lo + best_i * step;
    }
    if (refined > best.value) {
      best.value = refined;
      best.sigma = arg;
      best.omega = locus_omega(geo, seg.locus, arg);
      best.locus = seg.locus;
    }
  }

  // Name the winner after the nearest attainable closed-form candidate.
  double best_dist = std::numeric_limits<double>::max();
  for (const Candidate& c : candidate_maxima(n)) {
    if (!c.on_boundary) continue;
    const double dist = std::abs(c.value - best.value);
    if (dist < best_dist) {
      best_dist = dist;
      best.label = c.label;
    }
  }
  return best;
}

double region_oracle(int n, int samples_per_segment) {
  return region_maximum(n, samples_per_segment).value;
}

std::vector<Candidate> candidate_maxima(int n) {
  if (n < 3) throw DomainError("candidate_maxima: N >= 3 required");
  const double nd = n;
  const Geometry geo = geometry(n);
  const double sec = 1.0 / std::cos(kPi / nd);
  const double cot_half = 1.0 / std::tan(kPi / (2.0 * nd));
  const double cot = geo.slope;
  const bool hexagon = n >= 4 && n <= 18;
  const bool five_loci = n >= 19;

  std::vector<Candidate> c;
  c.push_back({"gN", nd / 2.0, nd, true});
  c.push_back({"g5", nd - 1.0, nd - 1.0, five_loci});
  c.push_back({"g13", 1.0 + nd * (nd - 2.0) / (2.0 * geo.sigma13), geo.sigma13, five_loci});
  c.push_back({"g14", 1.0 + nd * (nd - 2.0) / (2.0 * geo.sigma14), geo.sigma14, five_loci});
  const double csc_half = 1.0 / std::sin(kPi / (2.0 * nd));
  c.push_back({"g23", 0.125 * csc_half * csc_half * sec, geo.sigma23, hexagon});
  const double q = 2.0 * nd - 1.0 - sec;  // 2 * sigma34
  c.push_back({"g34", (cot_half * cot_half + q * q) / (4.0 * q), geo.sigma34, hexagon});
  c.push_back({"g24", nd * (cot * cot + 1.0) / 4.0, nd / 2.0, n == 3});
  return c;
}

}  // namespace liesync::region
