#include "marginlab/lowerbound/probes.hpp"

#include "marginlab/core/errors.hpp"
#include "marginlab/ntk/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace marginlab {

namespace {

// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

void check_tail(std::span<const double> z, std::size_t d) {
    if (d < 3 || z.size() != d - 2)
        throw DimensionError("tail has " + std::to_string(z.size()) + " entries, expected d - 2 = " +
                             std::to_string(d < 2 ? 0 : d - 2));
    for (double v : z)
        if (v != 1.0 && v != -1.0) throw DimensionError("tail entries must be +-1");
}

double tail_dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

std::vector<double> with_head(double h1v, double h2v, std::span<const double> z) {
    std::vector<double> x;
    x.reserve(z.size() + 2);
    x.push_back(h1v);
    x.push_back(h2v);
    x.insert(x.end(), z.begin(), z.end());
    return x;
}

void draw_tail(CounterRng& rng, std::vector<double>& z) {
    for (double& v : z) v = rng.sign();
}

}  // namespace

double h1(double t) { return t * (1.0 - std::acos(std::clamp(t, -1.0, 1.0)) / std::numbers::pi); }

double h2(double t) { return std::sqrt(std::max(0.0, 1.0 - t * t)) / std::numbers::pi; }

double ktilde1(std::span<const double> z, std::span<const double> z_prime, std::size_t d) {
    check_tail(z, d);
    check_tail(z_prime, d);
    const double scale = static_cast<double>(d - 1);
    return scale * h1(tail_dot(z, z_prime) / scale);
}

double ktilde2(std::span<const double> z, std::span<const double> z_prime, std::size_t d) {
    check_tail(z, d);
    check_tail(z_prime, d);
    const double scale = static_cast<double>(d - 1);
    return scale * h2(tail_dot(z, z_prime) / scale);
}

double ktilde1_lifted(std::span<const double> z, std::span<const double> z_prime) {
    return k1(with_head(0.0, 1.0, z_prime), with_head(1.0, 0.0, z));
}

double ktilde2_lifted(std::span<const double> z, std::span<const double> z_prime) {
    return k2(with_head(0.0, 1.0, z_prime), with_head(1.0, 0.0, z));
}

double f_tilde(std::span<const double> z, std::span<const double> tails, std::span<const double> beta, double tau1,
               double tau2, std::size_t d) {
    check_tail(z, d);
    const std::size_t t = d - 2;
    if (tails.size() != beta.size() * t) throw DimensionError("f_tilde: tails and beta disagree in length");
    const double scale = static_cast<double>(d - 1);
    double s = 0.0;
    for (std::size_t i = 0; i < beta.size(); ++i) {
        if (beta[i] == 0.0) continue;
        const double c = tail_dot(z, tails.subspan(i * t, t)) / scale;
        const double a = scale * h1(c);
        const double b = scale * h2(c);
        s += beta[i] * (tau1 * a + tau2 * (a + b));
    }
    return s;
}

std::vector<double> tails_of(const Dataset& data) {
    if (data.d() < 3) throw DimensionError("tails_of: need d >= 3");
    std::vector<double> out;
    out.reserve(data.n() * (data.d() - 2));
    for (std::size_t i = 0; i < data.n(); ++i) {
        const auto x = data.x(i);
        out.insert(out.end(), x.begin() + 2, x.end());
    }
    return out;
}

ResidualStats cancellation_residuals(std::span<const double> x, std::size_t d, std::size_t trials, Seed seed) {
    if (d < 8) throw DimensionError("cancellation_residuals: need d >= 8");
    if (x.size() != d) throw DimensionError("cancellation_residuals: x must have length d");
    ResidualStats st;
    st.count = trials;
    if (trials == 0) {
        st.k1_mean = st.k1_max = st.k2_mean = st.k2_max = std::numeric_limits<double>::quiet_NaN();
        return st;
    }
    const std::span<const double> x_tail = x.subspan(2);
    std::vector<double> z(d - 2);
    CompensatedSum s1, s2;
    for (std::size_t k = 0; k < trials; ++k) {
        CounterRng rng(seed, k);
        draw_tail(rng, z);
        const std::vector<double> plus = with_head(1.0, 0.0, z);
        const std::vector<double> minus = with_head(-1.0, 0.0, z);
        const double r1 = std::abs(k1(x, plus) + k1(x, minus) - 2.0 * ktilde1_lifted(z, x_tail));
        const double r2 = std::abs(k2(x, plus) + k2(x, minus) - 2.0 * ktilde2_lifted(z, x_tail));
        s1.add(r1);
        s2.add(r2);
        st.k1_max = std::max(st.k1_max, r1);
        st.k2_max = std::max(st.k2_max, r2);
    }
    st.k1_mean = s1.value() / static_cast<double>(trials);
    st.k2_mean = s2.value() / static_cast<double>(trials);
    return st;
}

PolyG::PolyG(std::size_t d_, double tau1_, double tau2_) : d(d_), tau1(tau1_), tau2(tau2_) {
    if (d < 2) throw DimensionError("PolyG: need d >= 2");
    const double s = static_cast<double>(d - 1);
    const double pi = std::numbers::pi;
    coeff[0] = tau2 * s / pi;
    coeff[1] = (tau1 + tau2) * s / 2.0;
    coeff[2] = tau1 * s / pi + tau2 * s / (2.0 * pi);
    coeff[3] = 0.0;
    coeff[4] = tau1 * s / (6.0 * pi) + tau2 * s / (24.0 * pi);
}

double PolyG::operator()(double t) const noexcept {
    return (((coeff[4] * t + coeff[3]) * t + coeff[2]) * t + coeff[1]) * t + coeff[0];
}

double PolyG::scaled_coefficient(int k) const noexcept {
    return coeff[k] / std::pow(static_cast<double>(d - 1), k);
}

double poly_g_residual(double t, double tau1, double tau2, std::size_t d) {
    if (!(std::abs(t) <= 0.75)) throw DomainError("poly_g_residual: |t| must be <= 0.75");
    const PolyG g(d, tau1, tau2);
    const double target = static_cast<double>(d - 1) * ((tau1 + tau2) * h1(t) + tau2 * h2(t));
    return std::abs(g(t) - target);
}

double cube_exp_bruteforce(std::size_t d, std::span<const double> points, std::span<const double> beta, int p, int q) {
    if (d > 14) throw ScaleError("cube_exp_bruteforce: d = " + std::to_string(d) + " exceeds the exhaustive cap 14");
    if (d == 0) throw DimensionError("cube_exp_bruteforce: d must be positive");
    if (p < 0 || q < 0 || p > 6 || q > 6) throw DomainError("cube_exp_bruteforce: need 0 <= p, q <= 6");
    if (points.size() != beta.size() * d) throw DimensionError("cube_exp_bruteforce: points and beta disagree");
    const std::size_t n = beta.size();
    const bool mixed = (p + q) % 2 == 1;
    std::vector<double> z(d);
    std::vector<double> s(n);
    CompensatedSum total;
    // Half cube: z_d = +1; the partner -z contributes (-1)^{p+q} times the same term.
    const std::uint64_t half = std::uint64_t{1} << (d - 1);
    for (std::uint64_t mask = 0; mask < half; ++mask) {
        for (std::size_t k = 0; k + 1 < d; ++k) z[k] = (mask >> k) & 1U ? -1.0 : 1.0;
        z[d - 1] = 1.0;
        for (std::size_t i = 0; i < n; ++i) s[i] = tail_dot(z, points.subspan(i * d, d));
        auto term = [&](double sign) {
            double a = 0.0, b = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double v = sign * s[i];
                a += beta[i] * std::pow(v, q);
                b += beta[i] * std::pow(v, p);
            }
            return a * b;
        };
        const double t_plus = term(1.0);
        const double t_minus = term(-1.0);
        total.add(mixed ? t_plus + t_minus : t_plus);
        if (!mixed) total.add(t_minus);
    }
    return total.value() / std::ldexp(1.0, static_cast<int>(d));
}

double RatioSample::quantile(double q) const {
    if (ratios.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

RatioSample f_tilde_gap_probe(const Dataset& support, std::span<const double> beta, double tau1, double tau2,
                              std::size_t trials, Seed seed) {
    const std::size_t d = support.d();
    if (beta.size() != support.n()) throw DimensionError("f_tilde_gap_probe: beta length differs from support size");
    const NtkConfig cfg{tau1, tau2};
    double l1 = 0.0;
    for (double b : beta) l1 += std::abs(b);
    const double unit = (tau1 + tau2) / static_cast<double>(d) * l1;
    const std::vector<double> tails = tails_of(support);
    auto f = [&](const std::vector<double>& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < support.n(); ++i)
            if (beta[i] != 0.0) s += beta[i] * ntk(support.x(i), x, cfg);
        return s;
    };
    RatioSample out;
    std::vector<double> z(d - 2);
    for (std::size_t k = 0; k < trials; ++k) {
        CounterRng rng(seed, k);
        draw_tail(rng, z);
        const double ft2 = 2.0 * f_tilde(z, tails, beta, tau1, tau2, d);
        const double fp = f(with_head(1.0, 0.0, z)) + f(with_head(-1.0, 0.0, z));
        const double fm = f(with_head(0.0, 1.0, z)) + f(with_head(0.0, -1.0, z));
        const double denom = unit > 0.0 ? unit : 1.0;
        out.ratios.push_back(std::abs(fp - ft2) / denom);
        out.ratios.push_back(std::abs(fm - ft2) / denom);
    }
    return out;
}

ProbabilityEstimate wilson_interval(std::size_t hits, std::size_t trials, double z) {
    ProbabilityEstimate e;
    e.hits = hits;
    e.trials = trials;
    if (trials == 0) {
        e.p = std::numeric_limits<double>::quiet_NaN();
        e.lower = 0.0;
        e.upper = 1.0;
        return e;
    }
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(hits) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    e.p = p;
    // The exact interval always contains p; clamp away the rounding.
    e.lower = std::clamp(center - half, 0.0, p);
    e.upper = std::clamp(center + half, p, 1.0);
    return e;
}

ProbabilityEstimate f_tilde_mass_probe(const Dataset& support, std::span<const double> beta, double tau1, double tau2,
                                       double c, std::size_t trials, Seed seed, double multiplier) {
    const std::size_t d = support.d();
    if (beta.size() != support.n()) throw DimensionError("f_tilde_mass_probe: beta length differs from support size");
    double l1 = 0.0;
    for (double b : beta) l1 += std::abs(b);
    const double threshold = multiplier * c * (tau1 + tau2) / static_cast<double>(d) * l1;
    const std::vector<double> tails = tails_of(support);
    std::vector<double> z(d - 2);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < trials; ++k) {
        CounterRng rng(seed, k);
        draw_tail(rng, z);
        if (std::abs(f_tilde(z, tails, beta, tau1, tau2, d)) >= threshold) ++hits;
    }
    ProbabilityEstimate e = wilson_interval(hits, trials);
    e.threshold = threshold;
    return e;
}

}  // namespace marginlab
