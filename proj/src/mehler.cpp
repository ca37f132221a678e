#include "grushin/mehler.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace grushin {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// log(sinh z) without overflow: for large z, sinh z ~ e^z / 2.
double log_sinh(double z) {
    if (z < 1.0) return std::log(std::sinh(z));
    return z + std::log1p(-std::exp(-2.0 * z)) - std::log(2.0);
}

// csch z - accurate near 0 through expm1.
double csch(double z) { return 2.0 * std::exp(-z) / (-std::expm1(-2.0 * z)); }

}  // namespace

void MehlerQuery::validate() const {
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
    if (!(t > 0.0)) throw std::invalid_argument("t must be > 0");
    if (n != 1 && n != 2) throw std::invalid_argument("n must be 1 or 2");
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(x0[i]))
            throw std::invalid_argument("x, x0 must be finite");
    }
}

double mehler_kernel(const MehlerQuery& q) {
    q.validate();
    const double l = q.lambda;
    const double t = q.t;
    const int n = q.n;

    double d2 = 0.0;   // |x - x0|^2
    double s2 = 0.0;   // |x|^2 + |x0|^2
    for (int i = 0; i < n; ++i) {
        const double d = q.x[i] - q.x0[i];
        d2 += d * d;
        s2 += q.x[i] * q.x[i] + q.x0[i] * q.x0[i];
    }

    if (l == 0.0) {
        return std::pow(kTwoPi * t, -0.5 * n) * std::exp(-d2 / (2.0 * t));
    }

    const double z = l * t;
    // Prefactor (l / (2 pi sinh z))^{n/2} in log space.
    const double log_pref = 0.5 * n * (std::log(l) - std::log(kTwoPi) - log_sinh(z));
    // Cancellation-free bracket: S coth - 2 x.x0 csch = d2 csch + s2 tanh(z/2).
    const double bracket = d2 * csch(z) + s2 * std::tanh(0.5 * z);
    const double log_val = log_pref - 0.5 * l * bracket;
    return std::exp(log_val);
}

namespace {

// psi_n(u) for n = 0..terms-1 via the normalized three-term recurrence
//   psi_0 = pi^{-1/4} e^{-u^2/2},
//   psi_{n+1} = sqrt(2/(n+1)) u psi_n - sqrt(n/(n+1)) psi_{n-1}.
void hermite_functions(double u, int terms, std::vector<double>& out) {
    out.resize(terms);
    const double pi_quarter = 0.75112554446494248285870300477623;  // pi^{-1/4}
    double prev = 0.0;
    double cur = pi_quarter * std::exp(-0.5 * u * u);
    for (int m = 0; m < terms; ++m) {
        out[m] = cur;
        const double next =
            std::sqrt(2.0 / (m + 1.0)) * u * cur - std::sqrt(m / (m + 1.0)) * prev;
        prev = cur;
        cur = next;
    }
}

}  // namespace

HermiteSeriesResult mehler_hermite_oracle(const MehlerQuery& q, int terms, double rel_tol) {
    q.validate();
    if (!(q.lambda > 0.0)) throw std::invalid_argument("oracle requires lambda > 0");
    if (terms < 1) throw std::invalid_argument("terms must be >= 1");

    const double l = q.lambda;
    const double sl = std::sqrt(l);
    const double r = std::exp(-l * q.t);  // spectral ratio per level

    std::vector<double> a, b, a2, b2;
    hermite_functions(sl * q.x[0], terms, a);
    hermite_functions(sl * q.x0[0], terms, b);
    if (q.n == 2) {
        hermite_functions(sl * q.x[1], terms, a2);
        hermite_functions(sl * q.x0[1], terms, b2);
    }

    HermiteSeriesResult res;
    if (q.n == 1) {
        double sum = 0.0;
        double w = std::exp(-0.5 * l * q.t);
        for (int m = 0; m < terms; ++m) {
            sum += w * a[m] * b[m];
            w *= r;
        }
        res.value = sl * sum;
        // |psi_m| <= ~0.8 uniformly, so the dropped tail is below the
        // geometric sum of the remaining weights.
        res.tail_estimate = sl * std::exp(-l * (terms + 0.5) * q.t) / (1.0 - r);
    } else {
        // Tensor product: separable sum over levels (m1, m2) with
        // m1 + m2 < terms kept per factor independently is wasteful;
        // instead sum each 1-D series fully and multiply.
        double sum1 = 0.0, sum2 = 0.0;
        double w = std::exp(-0.5 * l * q.t);
        for (int m = 0; m < terms; ++m) {
            sum1 += w * a[m] * b[m];
            sum2 += w * a2[m] * b2[m];
            w *= r;
        }
        res.value = l * sum1 * sum2;
        // Product-rule bound |s1 s2 - s1h s2h| <= |t1||s2| + |s1||t2| + |t1 t2|
        // with each 1-D tail below the geometric weight sum (|psi_m| < 1).
        const double tail1 = std::exp(-l * (terms + 0.5) * q.t) / (1.0 - r);
        res.tail_estimate =
            l * (tail1 * std::abs(sum2) + std::abs(sum1) * tail1 + tail1 * tail1);
    }
    const double scale = std::max(std::abs(res.value), std::pow(l, 0.25 * q.n));
    res.truncation_ok = res.tail_estimate <= rel_tol * scale;
    return res;
}

}  // namespace grushin
