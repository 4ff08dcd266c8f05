#include "sl2ode/coefficient.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "sl2ode/errors.hpp"

namespace sl2ode {

Coefficient::Coefficient(CoeffKind kind, std::vector<double> params, std::vector<double> abscissae)
    : kind_(kind), params_(std::move(params)), abscissae_(std::move(abscissae)) {}

Coefficient Coefficient::constant(double value) {
    return Coefficient(CoeffKind::constant, {value});
}

Coefficient Coefficient::polynomial(std::vector<double> coeffs) {
    if (coeffs.empty())
        throw UsageError("polynomial coefficient needs at least one term");
    return Coefficient(CoeffKind::polynomial, std::move(coeffs));
}

Coefficient Coefficient::cosine(double amplitude, double frequency, double phase) {
    return Coefficient(CoeffKind::cosine, {amplitude, frequency, phase});
}

Coefficient Coefficient::table(std::vector<double> abscissae, std::vector<double> values) {
    if (abscissae.size() != values.size())
        throw UsageError("table coefficient: abscissae and values differ in length");
    if (abscissae.size() < 2)
        throw UsageError("table coefficient needs at least two nodes");
    for (std::size_t i = 1; i < abscissae.size(); ++i)
        if (!(abscissae[i] > abscissae[i - 1]))
            throw UsageError("table coefficient: abscissae must be strictly increasing");
    return Coefficient(CoeffKind::table, std::move(values), std::move(abscissae));
}

double Coefficient::operator()(double t) const {
    switch (kind_) {
        case CoeffKind::constant:
            return params_[0];
        case CoeffKind::polynomial: {
            double acc = 0;
            for (std::size_t i = params_.size(); i-- > 0;)
                acc = acc * t + params_[i];
            return acc;
        }
        case CoeffKind::cosine:
            return params_[0] * std::cos(params_[1] * t + params_[2]);
        case CoeffKind::table: {
            const double lo = abscissae_.front(), hi = abscissae_.back();
            // tolerate float rounding at the interval ends, reject genuine extrapolation
            const double slack = 1e-9 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
            if (t < lo - slack || t > hi + slack)
                throw DomainError("table coefficient evaluated at t = " + std::to_string(t) +
                                  " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
            const double tc = std::clamp(t, lo, hi);
            auto it = std::upper_bound(abscissae_.begin(), abscissae_.end(), tc);
            std::size_t i = static_cast<std::size_t>(std::distance(abscissae_.begin(), it));
            if (i == 0) i = 1;
            if (i == abscissae_.size()) i = abscissae_.size() - 1;
            const double t0 = abscissae_[i - 1], t1 = abscissae_[i];
            const double w = (tc - t0) / (t1 - t0);
            return params_[i - 1] * (1.0 - w) + params_[i] * w;
        }
    }
    throw UsageError("corrupt coefficient kind");
}

bool Coefficient::is_constant() const {
    return kind_ == CoeffKind::constant ||
           (kind_ == CoeffKind::polynomial && params_.size() == 1);
}

double Coefficient::constant_value() const {
    if (!is_constant())
        throw UsageError("coefficient is not constant");
    return params_[0];
}

std::uint64_t Coefficient::fingerprint() const {
    std::uint64_t h = 1469598103934665603ull; // FNV offset basis
    auto mix = [&h](const void* data, std::size_t n) {
        const unsigned char* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    };
    const int tag = static_cast<int>(kind_);
    mix(&tag, sizeof tag);
    for (double v : params_) mix(&v, sizeof v);
    for (double v : abscissae_) mix(&v, sizeof v);
    return h;
}

} // namespace sl2ode
