#pragma once

// Test-only oracles, independent of the library's sampling/fitting paths.

#include <cmath>
#include <functional>

namespace oracles
{

// composite Simpson integration
inline double Integrate(const std::function<double(double)>& f, double a, double b, int n = 20000)
{
    if (n % 2)
        ++n;
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

inline double NormalPdf(double x, double mu, double sigma)
{
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
}

inline double NormalCdf(double x, double mu, double sigma)
{
    return 0.5 * (1.0 + std::erf((x - mu) / (sigma * std::sqrt(2.0))));
}

// mean of a normal truncated to [lo, hi] by rejection, via quadrature
inline double TruncNormalMean(double mu, double sigma, double lo, double hi)
{
    const double mass = NormalCdf(hi, mu, sigma) - NormalCdf(lo, mu, sigma);
    const double first = Integrate([&](double x) { return x * NormalPdf(x, mu, sigma); }, lo, hi);
    return first / mass;
}

// mean of max(X, 0) for X ~ N(mu, sigma), closed form
inline double ClampedNormalMean(double mu, double sigma)
{
    return mu * NormalCdf(mu / sigma, 0.0, 1.0) + sigma * NormalPdf(mu / sigma, 0.0, 1.0);
}

// mean of an exponential(lambda) truncated to [lo, hi] by rejection, via quadrature
inline double TruncExpMean(double lambda, double lo, double hi)
{
    const auto pdf = [&](double x) { return lambda * std::exp(-lambda * x); };
    const double mass = Integrate(pdf, lo, hi);
    const double first = Integrate([&](double x) { return x * pdf(x); }, lo, hi);
    return first / mass;
}

// mean of geometric(p) (support 1,2,...) truncated to [lo, hi], by summation
inline double TruncGeomMean(double p, int lo, int hi)
{
    double mass = 0.0, first = 0.0;
    for (int k = lo; k <= hi; ++k)
    {
        const double pk = p * std::pow(1.0 - p, k - 1);
        mass += pk;
        first += k * pk;
    }
    return first / mass;
}

} // namespace oracles
