#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "rearr/builder.hpp"
#include "rearr/permutation.hpp"

namespace rearr {

struct QuadratureFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Smooth compactly supported bump: amplitude * exp(-1/(radius - |x|)^2) for
// |x| < radius, identically 0 outside.
struct BumpFunction {
    int n = 2;
    double radius = 0.49;
    double amplitude = 1.0;
};

double phi(const BumpFunction& bump, std::span<const double> x);

// Integral of exp(-1/(radius - |x|)^2) over the radius-ball in dimension n,
// by adaptive radial quadrature to relative tolerance quad_tol.
double bump_mass(int n, double radius, double quad_tol);

// A with integral(A * exp(-1/(0.49 - |x|)^2)) = 1; audited against a finer
// quadrature pass to within 2 * quad_tol.
double normalize_amplitude(int n, double quad_tol);

// The lattice coefficient field: one bump per assigned multi-index, scaled by
// the rearranged term. Standard layout puts peaks at the integer points; the
// unit-cube variant puts them at (2^-j1, ..., 2^-jn) with per-peak radii
// shrunk to keep supports disjoint and per-peak amplitudes renormalized to
// unit mass.
class FubiniField {
public:
    FubiniField(const Assignment& coeffs, double quad_tol, bool unit_cube = false);

    int n() const { return n_; }
    bool unit_cube() const { return unit_cube_; }
    double quad_tol() const { return quad_tol_; }
    double amplitude() const { return amplitude_; }

    double coefficient(const std::vector<std::uint32_t>& j) const;  // 0 if unassigned
    const std::vector<AssignmentEntry>& entries() const;

    double peak_radius(const std::vector<std::uint32_t>& j) const;
    double peak_amplitude(double radius) const;  // cached per-radius normalization
    std::vector<double> peak_center(const std::vector<std::uint32_t>& j) const;

    double eval(std::span<const double> x) const;

private:
    const Assignment* coeffs_;
    int n_;
    double quad_tol_;
    bool unit_cube_;
    double amplitude_;  // standard-layout normalization
    std::unordered_map<std::uint64_t, double> lattice_;
    mutable std::map<double, double> radius_amp_cache_;

    static std::uint64_t pack(const std::vector<std::uint32_t>& j);
};

double f_eval(const FubiniField& field, std::span<const double> x);

struct IteratedIntegralResult {
    double quadrature = 0.0;
    double coefficient_sum = 0.0;
    std::uint64_t peaks = 0;  // lattice points inside the box
    double bound = 0.0;       // quadrature error budget: quad_tol per enclosed peak
};

// Iterated integral of the field over [0, box_1] x ... x [0, box_n] in the
// integration order given by sigma (dx_{sigma(1)} innermost). Supports are
// pairwise disjoint, so the integral reduces to the coefficient sum over the
// enclosed lattice points; both the quadrature value and the reduction are
// computed and reported.
IteratedIntegralResult iterated_integral(const FubiniField& field, const Permutation& sigma,
                                         std::span<const double> box, double quad_tol);

// The build order that realizes user-facing integral targets s^(sigma): the
// iterated integral in order sigma equals the iterated sum whose outermost
// axis is sigma(n), i.e. the summation-order permutation rho with
// rho(a) = n + 1 - sigma^{-1}(a).
Permutation integral_order_to_sum_order(const Permutation& sigma);

} // namespace rearr
