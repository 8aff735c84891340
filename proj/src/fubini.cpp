#include "rearr/fubini.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rearr/compensated.hpp"

namespace rearr {

namespace {

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double bump_profile(double rho, double radius) {
    if (rho >= radius) return 0.0;
    double u = radius - rho;
    return std::exp(-1.0 / (u * u));
}

// exp(1/r^2 - 1/(r-rho)^2): the bump profile scaled by its center value, in
// [0, 1]. Stays representable for arbitrarily small radii, where the raw
// profile underflows and its normalizing amplitude overflows.
double scaled_profile(double rho, double radius) {
    if (rho >= radius) return 0.0;
    double u = radius - rho;
    return std::exp(1.0 / (radius * radius) - 1.0 / (u * u));
}

// Adaptive Simpson with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fb, double fm,
                        double whole, double tol, int depth) {
    if (depth > 60) throw QuadratureFailure("adaptive quadrature: refinement limit reached");
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, fm, flm, left, 0.5 * tol, depth + 1) +
           adaptive_simpson(f, m, b, fm, fb, frm, right, 0.5 * tol, depth + 1);
}

double integrate_1d(const std::function<double(double)>& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fb, fm, whole, tol, 0);
}

double sphere_surface(int n) {
    switch (n) {
        case 1: return 2.0;                       // two points
        case 2: return 2.0 * M_PI;                // circle length
        case 3: return 4.0 * M_PI;                // sphere area
        case 4: return 2.0 * M_PI * M_PI;
        default: throw std::invalid_argument("bump_mass: dimension out of range");
    }
}

// Tensor quadrature of g over an axis-aligned box, recursing one axis at a
// time. Used only for bumps clipped by an integration box.
double integrate_box(const std::function<double(std::span<const double>)>& g, std::vector<double>& point,
                     std::span<const double> lo, std::span<const double> hi, std::size_t axis, double tol) {
    if (axis == lo.size()) return g(point);
    auto slice = [&](double x) {
        point[axis] = x;
        return integrate_box(g, point, lo, hi, axis + 1, tol);
    };
    return integrate_1d(slice, lo[axis], hi[axis], tol);
}

} // namespace

double phi(const BumpFunction& bump, std::span<const double> x) {
    if (static_cast<int>(x.size()) != bump.n) throw std::invalid_argument("phi: dimension mismatch");
    return bump.amplitude * bump_profile(norm2(x), bump.radius);
}

double bump_mass(int n, double radius, double quad_tol) {
    double surface = sphere_surface(n);
    auto integrand = [&](double rho) { return std::pow(rho, n - 1) * bump_profile(rho, radius); };
    // rough pass to size an absolute tolerance for the relative target
    double scale = std::pow(radius, n) * bump_profile(0.0, radius);
    double rough = integrate_1d(integrand, 0.0, radius, 1e-3 * scale);
    double val = integrate_1d(integrand, 0.0, radius, 0.05 * quad_tol * std::max(rough, 1e-300));
    return surface * val;
}

double normalize_amplitude(int n, double quad_tol) {
    if (!(quad_tol > 0)) throw std::invalid_argument("normalize_amplitude: quad_tol must be > 0");
    double mass = bump_mass(n, 0.49, quad_tol);
    if (!(mass > 0)) throw QuadratureFailure("normalize_amplitude: vanishing mass");
    double amp = 1.0 / mass;
    // audit against a finer pass
    double mass_fine = bump_mass(n, 0.49, quad_tol / 8.0);
    if (std::fabs(amp * mass_fine - 1.0) > 2.0 * quad_tol)
        throw QuadratureFailure("normalize_amplitude: audit outside tolerance");
    return amp;
}

// ---------------------------------------------------------------------------
// FubiniField
// ---------------------------------------------------------------------------

std::uint64_t FubiniField::pack(const std::vector<std::uint32_t>& j) {
    std::uint64_t k = 0;
    for (std::uint32_t v : j) k = k * 1000003ULL + v;
    return k;
}

FubiniField::FubiniField(const Assignment& coeffs, double quad_tol, bool unit_cube)
    : coeffs_(&coeffs), n_(coeffs.n), quad_tol_(quad_tol), unit_cube_(unit_cube) {
    amplitude_ = normalize_amplitude(n_, quad_tol);
    for (const auto& e : coeffs.entries()) lattice_.emplace(pack(e.j), e.value);
}

double FubiniField::coefficient(const std::vector<std::uint32_t>& j) const {
    auto it = lattice_.find(pack(j));
    return it == lattice_.end() ? 0.0 : it->second;
}

const std::vector<AssignmentEntry>& FubiniField::entries() const { return coeffs_->entries(); }

double FubiniField::peak_radius(const std::vector<std::uint32_t>& j) const {
    if (!unit_cube_) return 0.49;
    std::uint32_t jmax = 0;
    std::uint32_t jmin = ~0u;
    for (std::uint32_t v : j) {
        jmax = std::max(jmax, v);
        jmin = std::min(jmin, v);
    }
    (void)jmin;
    // keep supports disjoint: stay below half the nearest lattice gap, which
    // along axis i is 2^-(j_i+1)
    double gap = 1.0;
    for (std::uint32_t v : j) gap = std::min(gap, std::ldexp(1.0, -static_cast<int>(v) - 1));
    return std::min(0.49 * std::ldexp(1.0, -static_cast<int>(jmax) - 1), 0.5 * gap);
}

double FubiniField::peak_amplitude(double radius) const {
    auto it = radius_amp_cache_.find(radius);
    if (it != radius_amp_cache_.end()) return it->second;
    double amp = 1.0 / bump_mass(n_, radius, quad_tol_);
    radius_amp_cache_.emplace(radius, amp);
    return amp;
}

std::vector<double> FubiniField::peak_center(const std::vector<std::uint32_t>& j) const {
    std::vector<double> c(n_);
    for (int i = 0; i < n_; ++i)
        c[i] = unit_cube_ ? std::ldexp(1.0, -static_cast<int>(j[i])) : static_cast<double>(j[i]);
    return c;
}

double FubiniField::eval(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("f_eval: dimension mismatch");
    if (!unit_cube_) {
        std::vector<std::uint32_t> j(n_);
        for (int i = 0; i < n_; ++i) {
            double r = std::round(x[i]);
            if (r < 1.0) return 0.0;
            j[i] = static_cast<std::uint32_t>(r);
        }
        double b = coefficient(j);
        if (b == 0.0) return 0.0;
        double d2 = 0.0;
        for (int i = 0; i < n_; ++i) {
            double d = x[i] - static_cast<double>(j[i]);
            d2 += d * d;
        }
        return b * amplitude_ * bump_profile(std::sqrt(d2), 0.49);
    }
    // unit-cube layout: candidate exponents from rounding -log2(x_i)
    std::vector<std::vector<std::uint32_t>> cands(n_);
    for (int i = 0; i < n_; ++i) {
        if (!(x[i] > 0.0) || x[i] > 1.0) return 0.0;
        double e = -std::log2(x[i]);
        long lo = std::lround(std::floor(e)), hi = std::lround(std::ceil(e));
        for (long c : {lo, hi, lo + 1}) {
            if (c >= 1 && c <= 4000) cands[i].push_back(static_cast<std::uint32_t>(c));
        }
    }
    std::vector<std::uint32_t> j(n_);
    std::function<double(int)> scan = [&](int axis) -> double {
        if (axis == n_) {
            double b = coefficient(j);
            if (b == 0.0) return 0.0;
            double r = peak_radius(j);
            double d2 = 0.0;
            for (int i = 0; i < n_; ++i) {
                double d = x[i] - std::ldexp(1.0, -static_cast<int>(j[i]));
                d2 += d * d;
            }
            double rho = std::sqrt(d2);
            if (rho >= r) return 0.0;
            return b * peak_amplitude(r) * bump_profile(rho, r);
        }
        for (std::uint32_t c : cands[axis]) {
            j[axis] = c;
            double v = scan(axis + 1);
            if (v != 0.0) return v;  // supports are disjoint: first hit is the only one
        }
        return 0.0;
    };
    return scan(0);
}

double f_eval(const FubiniField& field, std::span<const double> x) { return field.eval(x); }

IteratedIntegralResult iterated_integral(const FubiniField& field, const Permutation& sigma,
                                         std::span<const double> box, double quad_tol) {
    const int n = field.n();
    if (static_cast<int>(box.size()) != n) throw std::invalid_argument("iterated_integral: box rank mismatch");
    if (sigma.n != n) throw std::invalid_argument("iterated_integral: order rank mismatch");

    // deterministic order: sort enclosed peaks by the sigma-priority key
    struct Peak {
        std::vector<std::uint32_t> key;
        const AssignmentEntry* e;
    };
    std::vector<Peak> peaks;
    for (const auto& e : field.entries()) {
        bool inside = true;
        for (int i = 0; i < n; ++i) {
            double c = field.unit_cube() ? std::ldexp(1.0, -static_cast<int>(e.j[i])) : static_cast<double>(e.j[i]);
            if (c > box[i]) {
                inside = false;
                break;
            }
        }
        if (!inside) continue;
        Peak p;
        p.e = &e;
        p.key.resize(n);
        for (int v = 1; v <= n; ++v) p.key[v - 1] = e.j[sigma.inverse_of(v) - 1];
        peaks.push_back(std::move(p));
    }
    std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.key < b.key; });

    IteratedIntegralResult out;
    out.peaks = peaks.size();
    std::map<std::pair<double, double>, double> mass_cache;
    CompensatedSum csum, qsum;
    for (const auto& p : peaks) {
        csum += p.e->value;

        double radius = field.peak_radius(p.e->j);
        double amp = field.unit_cube() ? field.peak_amplitude(radius) : field.amplitude();
        auto center = field.peak_center(p.e->j);
        bool clipped = false;
        std::vector<double> lo(n), hi(n);
        for (int i = 0; i < n; ++i) {
            lo[i] = center[i] - radius;
            hi[i] = center[i] + radius;
            if (lo[i] < 0.0) {
                lo[i] = 0.0;
                clipped = true;
            }
            if (hi[i] > box[i]) {
                hi[i] = box[i];
                clipped = true;
            }
        }
        double unit;
        if (!clipped) {
            auto key = std::make_pair(radius, quad_tol);
            auto it = mass_cache.find(key);
            if (it == mass_cache.end()) it = mass_cache.emplace(key, bump_mass(n, radius, quad_tol)).first;
            unit = amp * it->second;
        } else {
            auto g = [&](std::span<const double> x) {
                double d2 = 0.0;
                for (int i = 0; i < n; ++i) {
                    double d = x[i] - center[i];
                    d2 += d * d;
                }
                return amp * bump_profile(std::sqrt(d2), radius);
            };
            std::vector<double> pt(n);
            double vol = 1.0;
            for (int i = 0; i < n; ++i) vol *= std::max(hi[i] - lo[i], 1e-300);
            unit = integrate_box(g, pt, lo, hi, 0, quad_tol / std::max(1.0, vol));
        }
        qsum += p.e->value * unit;
    }
    out.coefficient_sum = csum.value();
    out.quadrature = qsum.value();
    out.bound = quad_tol * static_cast<double>(out.peaks);
    return out;
}

Permutation integral_order_to_sum_order(const Permutation& sigma) {
    Permutation rho;
    rho.n = sigma.n;
    for (int a = 1; a <= sigma.n; ++a)
        rho.img[a - 1] = static_cast<std::uint8_t>(sigma.n + 1 - sigma.inverse_of(a));
    return rho;
}

} // namespace rearr
