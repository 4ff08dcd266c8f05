#pragma once

#include <cstdint>
#include <vector>

namespace sl2ode {

enum class CoeffKind { constant, polynomial, cosine, table };

/// Scalar coefficient curve: the time-dependent driving coefficient b1(t) of a
/// system, or (for the third-order family) a coupling curve evaluated in x.
class Coefficient {
public:
    static Coefficient constant(double value);
    /// coeffs[k] multiplies t^k; at least one coefficient required.
    static Coefficient polynomial(std::vector<double> coeffs);
    /// amplitude * cos(frequency * t + phase)
    static Coefficient cosine(double amplitude, double frequency, double phase);
    /// Piecewise-linear interpolation through (abscissae[i], values[i]);
    /// abscissae must be strictly increasing, sizes equal and >= 2.
    static Coefficient table(std::vector<double> abscissae, std::vector<double> values);

    double operator()(double t) const;

    CoeffKind kind() const { return kind_; }
    /// True for constant kind and degree-0 polynomials.
    bool is_constant() const;
    /// The value of a constant coefficient; UsageError if not constant.
    double constant_value() const;
    /// FNV-1a hash over kind and parameters; identical curves hash identically.
    std::uint64_t fingerprint() const;

    const std::vector<double>& params() const { return params_; }
    const std::vector<double>& abscissae() const { return abscissae_; }

private:
    Coefficient(CoeffKind kind, std::vector<double> params, std::vector<double> abscissae = {});

    CoeffKind kind_;
    std::vector<double> params_;
    std::vector<double> abscissae_; // table kind only
};

} // namespace sl2ode
