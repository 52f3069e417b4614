#include "pfc/potentials.hpp"

#include "pfc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pfc {

bool Interval::bounded() const { return std::isfinite(lower) || std::isfinite(upper); }

LatentHeat LatentHeat::linear(double ell) {
    return {
        [ell](double r) { return ell * r; },
        [ell](double) { return ell; },
        [](double) { return 0.0; },
        [](double) { return 0.0; },
    };
}

LatentHeat LatentHeat::log_cosh() {
    return {
        // log cosh r = |r| + log1p(exp(-2|r|)) - log 2, stable for large |r|
        [](double r) { const double x = std::abs(r); return x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0); },
        [](double r) { return std::tanh(r); },
        [](double r) { const double t = std::tanh(r); return 1.0 - t * t; },
        [](double r) { const double t = std::tanh(r); return -2.0 * t * (1.0 - t * t); },
    };
}

PotentialSpec PotentialSpec::regular(LatentHeat latent) {
    PotentialSpec p;
    p.variant_ = PotentialVariant::regular;
    p.convex_ = {
        [](double r) { return r * r * (r * r - 2.0 * r + 1.5); },
        [](double r) { return r * (4.0 * r * r - 6.0 * r + 3.0); },
        [](double r) { const double d = 2.0 * r - 1.0; return 3.0 * d * d; },
        [](double r) { return 24.0 * r - 12.0; },
    };
    p.smooth_ = {
        [](double r) { return -0.5 * r * r; },
        [](double r) { return -r; },
        [](double) { return -1.0; },
    };
    p.latent_ = std::move(latent);
    return p;
}

PotentialSpec PotentialSpec::logarithmic(double a, LatentHeat latent) {
    if (!(a > 0.0)) throw InvalidArgument("logarithmic potential: a must be positive");
    PotentialSpec p;
    p.variant_ = PotentialVariant::logarithmic;
    p.a_ = a;
    p.domain_ = {-1.0, 1.0};
    p.convex_ = {
        [](double r) {
            // (1+r)ln(1+r) + (1-r)ln(1-r), with 0 ln 0 = 0 at the endpoints
            const double up = r > -1.0 ? (1.0 + r) * std::log1p(r) : 0.0;
            const double dn = r < 1.0 ? (1.0 - r) * std::log1p(-r) : 0.0;
            return up + dn;
        },
        [](double r) { return std::log1p(r) - std::log1p(-r); },
        [](double r) { return 2.0 / (1.0 - r * r); },
        [](double r) { const double d = 1.0 - r * r; return 4.0 * r / (d * d); },
    };
    p.smooth_ = {
        [a](double r) { return -a * r * r; },
        [a](double r) { return -2.0 * a * r; },
        [a](double) { return -2.0 * a; },
    };
    p.latent_ = std::move(latent);
    return p;
}

PotentialSpec PotentialSpec::custom(ConvexPart convex, SmoothPart smooth, Interval domain,
                                    LatentHeat latent) {
    if (!domain.contains(0.0)) throw InvalidArgument("custom potential: 0 must lie in D(beta)");
    PotentialSpec p;
    p.variant_ = PotentialVariant::custom_smooth;
    p.domain_ = domain;
    p.convex_ = std::move(convex);
    p.smooth_ = std::move(smooth);
    p.latent_ = std::move(latent);
    return p;
}

void Regularization::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw InvalidArgument("regularization: epsilon must lie in (0, 1)");
    }
    if (!(tolerance > 0.0)) throw InvalidArgument("regularization: tolerance must be positive");
    if (max_iterations < 1) throw InvalidArgument("regularization: max_iterations must be >= 1");
}

double resolvent(const PotentialSpec& spec, const Regularization& reg, double r) {
    if (!std::isfinite(r)) throw InvalidArgument("resolvent: argument must be finite");
    if (r == 0.0) return 0.0;
    const double eps = reg.epsilon;
    const auto& dom = spec.domain();

    // s + eps*beta(s) is increasing and beta(0) = 0, so the root lies between 0 and r.
    double lo = r > 0.0 ? 0.0 : std::max(r, dom.lower);
    double hi = r > 0.0 ? std::min(r, dom.upper) : 0.0;
    const double tol = reg.tolerance * std::max(1.0, std::abs(r));

    double s = 0.5 * (lo + hi);
    for (int it = 0; it < reg.max_iterations; ++it) {
        const double f = s + eps * spec.beta(s) - r;
        if (std::abs(f) <= tol) return s;
        if (f < 0.0) lo = s; else hi = s;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s))) {
            return s;
        }
        double next = s - f / (1.0 + eps * spec.beta_prime(s));
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        s = next;
    }
    throw SolverError("resolvent: no convergence after " + std::to_string(reg.max_iterations) +
                      " iterations at r = " + std::to_string(r));
}

double yosida(const PotentialSpec& spec, const Regularization& reg, double r) {
    return (r - resolvent(spec, reg, r)) / reg.epsilon;
}

double yosida_derivative(const PotentialSpec& spec, const Regularization& reg, double r) {
    const double bp = spec.beta_prime(resolvent(spec, reg, r));
    return bp / (1.0 + reg.epsilon * bp);
}

double yosida_energy(const PotentialSpec& spec, const Regularization& reg, double r) {
    const double s = resolvent(spec, reg, r);
    return spec.beta_hat(s) + (r - s) * (r - s) / (2.0 * reg.epsilon);
}

namespace {

// Smooth step on [0,1]: S = a/(a+b), a = exp(-1/x), b = exp(-1/(1-x)).
// S' = S(1-S) c and S'' = S'(1-2S) c + S(1-S) c' with c = 1/x^2 + 1/(1-x)^2.
struct Step {
    double s, ds, dds;
};

Step smooth_step(double x) {
    if (x <= 0.0) return {0.0, 0.0, 0.0};
    if (x >= 1.0) return {1.0, 0.0, 0.0};
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    const double s = a / (a + b);
    const double y = 1.0 - x;
    const double c = 1.0 / (x * x) + 1.0 / (y * y);
    const double dc = -2.0 / (x * x * x) + 2.0 / (y * y * y);
    const double q = s * (1.0 - s);
    const double ds = q * c;
    return {s, ds, ds * (1.0 - 2.0 * s) * c + q * dc};
}

}  // namespace

double cutoff(double r) { return 1.0 - smooth_step(std::abs(r) - 1.0).s; }

double cutoff_derivative(double r) {
    const double d = -smooth_step(std::abs(r) - 1.0).ds;
    return r < 0.0 ? -d : d;
}

double cutoff_second(double r) { return -smooth_step(std::abs(r) - 1.0).dds; }

TruncatedLatentHeat lambda_trunc(const PotentialSpec& spec, double epsilon, double r) {
    const double y = epsilon * r;
    const double z = cutoff(y);
    const double dz = cutoff_derivative(y);
    const double ddz = cutoff_second(y);
    if (z == 0.0 && dz == 0.0 && ddz == 0.0) return {0.0, 0.0, 0.0};
    const double lh = spec.lambda_hat(r);
    const double l = spec.lambda(r);
    const double dl = spec.lambda_prime(r);
    return {
        lh * z,
        l * z + epsilon * lh * dz,
        dl * z + 2.0 * epsilon * l * dz + epsilon * epsilon * lh * ddz,
    };
}

GammaValue eval_gamma(const PotentialSpec& spec, double r) {
    if (!spec.domain().contains(r)) {
        throw DomainError("eval_gamma: r = " + std::to_string(r) + " lies outside D(beta)");
    }
    return {spec.beta(r) + spec.pi(r), spec.beta_prime(r) + spec.pi_prime(r)};
}

Nonlinearity::Nonlinearity(PotentialSpec spec, std::optional<Regularization> reg)
    : spec_(std::move(spec)), reg_(reg) {
    if (reg_) reg_->validate();
}

double Nonlinearity::beta(double r) const {
    return reg_ ? yosida(spec_, *reg_, r) : spec_.beta(r);
}

double Nonlinearity::beta_prime(double r) const {
    return reg_ ? yosida_derivative(spec_, *reg_, r) : spec_.beta_prime(r);
}

double Nonlinearity::beta_hat(double r) const {
    return reg_ ? yosida_energy(spec_, *reg_, r) : spec_.beta_hat(r);
}

double Nonlinearity::lambda(double r) const {
    return reg_ ? lambda_trunc(spec_, reg_->epsilon, r).value : spec_.lambda(r);
}

double Nonlinearity::lambda_prime(double r) const {
    return reg_ ? lambda_trunc(spec_, reg_->epsilon, r).derivative : spec_.lambda_prime(r);
}

std::optional<std::pair<double, double>> Nonlinearity::guard(double margin) const {
    if (reg_ || !spec_.domain().bounded()) return std::nullopt;
    return std::make_pair(spec_.domain().lower + margin, spec_.domain().upper - margin);
}

}  // namespace pfc
