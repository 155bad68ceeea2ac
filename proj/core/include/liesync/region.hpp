#pragma once

// Spectral inclusion region for Laplacians of weighted digraphs (weights in
// [0, 1]) on N vertices: upper-half boundary assembly from its five loci,
// membership tests, a brute-force maximizer of g(v) = |v|^2 / (2 Re v) over
// the boundary, and the closed-form candidate maxima.

#include <complex>
#include <string>
#include <vector>

#include "liesync/matfun.hpp"

namespace liesync::region {

struct RegionPoint {
  double sigma = 0.0;  // Re v
  double omega = 0.0;  // Im v (upper half)
  int locus = 0;       // 1..5
  double g = 0.0;      // |v|^2 / (2 sigma), 0 at the origin
};

/// g evaluated at (sigma, omega); defined as 0 at the origin.
double gain_of_point(double sigma, double omega);

/// Upper-half boundary of the inclusion region, assembled from the loci
/// segments active for this N, sampled with `samples` points in total
/// (endpoints of every segment always included).  Requires N >= 3 and
/// samples >= 100.
std::vector<RegionPoint> region_boundary(int n, int samples = 1000);

/// True when v lies in the closed region (within tol).
bool point_in_region(int n, Complex v, double tol = 1e-8);

struct RegionMaximum {
  double value = 0.0;
  double sigma = 0.0;
  double omega = 0.0;
  int locus = 0;
  std::string label;  // nearest closed-form candidate
};

/// Brute-force maximum of g over the sampled boundary (dense sampling per
/// segment plus golden-section refinement; exact endpoint evaluation).
/// Independent of kmin_closed_form.
RegionMaximum region_maximum(int n, int samples_per_segment = 10000);

/// Convenience wrapper returning only the maximal value.
double region_oracle(int n, int samples_per_segment = 10000);

struct Candidate {
  std::string label;
  double value = 0.0;
  double sigma = 0.0;
  bool on_boundary = false;  // attained on the active boundary for this N
};

/// All closed-form candidate maxima with their boundary-attainability for
/// the given N: gN, g5, g13, g14, g23, g34, g24.
std::vector<Candidate> candidate_maxima(int n);

}  // namespace liesync::region
