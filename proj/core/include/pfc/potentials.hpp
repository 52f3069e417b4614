#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <utility>

namespace pfc {

/// Open interval (lower, upper); infinite endpoints allowed.
struct Interval {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    bool contains(double r) const { return r > lower && r < upper; }
    bool bounded() const;
};

using ScalarFn = std::function<double(double)>;

/// Latent heat primitive and its first three derivatives: lambda_hat, lambda,
/// lambda', lambda''.
struct LatentHeat {
    ScalarFn primitive;
    ScalarFn value;
    ScalarFn derivative;
    ScalarFn second;

    /// lambda_hat(r) = ell * r, so lambda is the constant ell.
    static LatentHeat linear(double ell);
    /// lambda_hat(r) = log cosh r, lambda = tanh.
    static LatentHeat log_cosh();
};

/// Convex, possibly singular part: beta_hat and beta, beta', beta''.
struct ConvexPart {
    ScalarFn energy;
    ScalarFn value;
    ScalarFn derivative;
    ScalarFn second;
};

/// Smooth perturbation: pi_hat and pi, pi'.
struct SmoothPart {
    ScalarFn energy;
    ScalarFn value;
    ScalarFn derivative;
};

enum class PotentialVariant { regular, logarithmic, custom_smooth };

/// Double-well potential W = beta_hat + pi_hat with single-valued beta on an
/// open interval, plus the latent-heat function.
class PotentialSpec {
public:
    /// W(r) = r^2 (r-1)^2 with beta_hat = r^4 - 2r^3 + 3/2 r^2, pi_hat = -r^2/2.
    static PotentialSpec regular(LatentHeat latent = LatentHeat::linear(1.0));
    /// W(r) = (1+r)ln(1+r) + (1-r)ln(1-r) - a r^2 on (-1, 1).
    static PotentialSpec logarithmic(double a, LatentHeat latent = LatentHeat::linear(1.0));
    static PotentialSpec custom(ConvexPart convex, SmoothPart smooth, Interval domain,
                                LatentHeat latent = LatentHeat::linear(1.0));

    PotentialVariant variant() const { return variant_; }
    double a() const { return a_; }
    const Interval& domain() const { return domain_; }
    const LatentHeat& latent_heat() const { return latent_; }
    void set_latent_heat(LatentHeat latent) { latent_ = std::move(latent); }

    double beta_hat(double r) const { return convex_.energy(r); }
    double beta(double r) const { return convex_.value(r); }
    double beta_prime(double r) const { return convex_.derivative(r); }
    double beta_second(double r) const { return convex_.second(r); }
    double pi_hat(double r) const { return smooth_.energy(r); }
    double pi(double r) const { return smooth_.value(r); }
    double pi_prime(double r) const { return smooth_.derivative(r); }
    double lambda_hat(double r) const { return latent_.primitive(r); }
    double lambda(double r) const { return latent_.value(r); }
    double lambda_prime(double r) const { return latent_.derivative(r); }
    double lambda_second(double r) const { return latent_.second(r); }

private:
    PotentialSpec() = default;

    PotentialVariant variant_ = PotentialVariant::regular;
    double a_ = 0.0;
    Interval domain_;
    ConvexPart convex_;
    SmoothPart smooth_;
    LatentHeat latent_;
};

/// Yosida level epsilon in (0,1) and the scalar resolvent solve controls.
struct Regularization {
    double epsilon = 0.1;
    double tolerance = 1e-12;
    int max_iterations = 100;

    void validate() const;
};

/// s = (I + eps beta)^{-1}(r), i.e. the root of s + eps beta(s) = r in D(beta).
/// Safeguarded Newton on a bracket inside the domain. Throws SolverError when
/// the iteration cap is hit.
double resolvent(const PotentialSpec& spec, const Regularization& reg, double r);

/// beta_eps(r) = (r - resolvent(r)) / eps.
double yosida(const PotentialSpec& spec, const Regularization& reg, double r);
/// d/dr beta_eps(r) = beta'(s) / (1 + eps beta'(s)), s = resolvent(r).
double yosida_derivative(const PotentialSpec& spec, const Regularization& reg, double r);
/// Primitive of beta_eps vanishing at 0 (Moreau envelope of beta_hat).
double yosida_energy(const PotentialSpec& spec, const Regularization& reg, double r);

/// Smooth cutoff: 1 on |r| < 1, 0 on |r| > 2, built from exp(-1/x).
double cutoff(double r);
double cutoff_derivative(double r);
double cutoff_second(double r);

struct TruncatedLatentHeat {
    double primitive;   // Lambda_eps(r) = lambda_hat(r) cutoff(eps r)
    double value;       // lambda_eps(r) = d/dr Lambda_eps
    double derivative;  // lambda_eps'(r)
};

TruncatedLatentHeat lambda_trunc(const PotentialSpec& spec, double epsilon, double r);

struct GammaValue {
    double value;       // beta + pi
    double derivative;  // beta' + pi'
};

/// Throws DomainError when r lies outside D(beta).
GammaValue eval_gamma(const PotentialSpec& spec, double r);

/// The nonlinear coefficients the solvers actually use: the potential itself,
/// or its epsilon-family (beta_eps, lambda_eps) when a regularization is given.
class Nonlinearity {
public:
    explicit Nonlinearity(PotentialSpec spec, std::optional<Regularization> reg = std::nullopt);

    const PotentialSpec& spec() const { return spec_; }
    const std::optional<Regularization>& regularization() const { return reg_; }

    double beta(double r) const;
    double beta_prime(double r) const;
    double beta_hat(double r) const;
    double pi(double r) const { return spec_.pi(r); }
    double pi_prime(double r) const { return spec_.pi_prime(r); }
    double lambda(double r) const;
    double lambda_prime(double r) const;

    /// Closed guard interval [inf D + margin, sup D - margin] for singular,
    /// unregularized potentials; empty otherwise.
    std::optional<std::pair<double, double>> guard(double margin) const;

private:
    PotentialSpec spec_;
    std::optional<Regularization> reg_;
};

}  // namespace pfc
