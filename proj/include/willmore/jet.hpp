#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace willmore {

/// Truncated Taylor series f(x0 + e) = sum_k c[k] e^k, k < N.
/// Arithmetic is exact up to the truncation order (forward-mode AD).
template <std::size_t N>
struct Jet {
    std::array<double, N> c{};

    static Jet variable(double x0)
    {
        Jet j;
        j.c[0] = x0;
        if constexpr (N > 1) {
            j.c[1] = 1.0;
        }
        return j;
    }

    static Jet constant(double x0)
    {
        Jet j;
        j.c[0] = x0;
        return j;
    }

    double value() const { return c[0]; }

    /// k-th derivative at x0.
    double derivative(std::size_t k) const
    {
        double fact = 1.0;
        for (std::size_t i = 2; i <= k; ++i) {
            fact *= static_cast<double>(i);
        }
        return c[k] * fact;
    }

    friend Jet operator+(Jet a, const Jet& b)
    {
        for (std::size_t k = 0; k < N; ++k) a.c[k] += b.c[k];
        return a;
    }
    friend Jet operator-(Jet a, const Jet& b)
    {
        for (std::size_t k = 0; k < N; ++k) a.c[k] -= b.c[k];
        return a;
    }
    friend Jet operator-(Jet a)
    {
        for (auto& x : a.c) x = -x;
        return a;
    }
    friend Jet operator*(double s, Jet a)
    {
        for (auto& x : a.c) x *= s;
        return a;
    }
    friend Jet operator+(double s, Jet a)
    {
        a.c[0] += s;
        return a;
    }
    friend Jet operator-(Jet a, double s)
    {
        a.c[0] -= s;
        return a;
    }
    friend Jet operator*(const Jet& a, const Jet& b)
    {
        Jet out;
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t j = 0; i + j < N; ++j) {
                out.c[i + j] += a.c[i] * b.c[j];
            }
        }
        return out;
    }
    friend Jet operator/(const Jet& a, const Jet& b)
    {
        // out * b = a, solved order by order
        Jet out;
        for (std::size_t k = 0; k < N; ++k) {
            double s = a.c[k];
            for (std::size_t j = 1; j <= k; ++j) {
                s -= b.c[j] * out.c[k - j];
            }
            out.c[k] = s / b.c[0];
        }
        return out;
    }
};

namespace detail {

// f(x0 + e) from the derivative list f^(k)(x0), composed with e = x - x0.
template <std::size_t N, class DerivativeAt>
Jet<N> compose(const Jet<N>& x, DerivativeAt&& deriv)
{
    Jet<N> e = x;
    e.c[0] = 0.0;
    Jet<N> out = Jet<N>::constant(deriv(0));
    Jet<N> power = Jet<N>::constant(1.0);
    double fact = 1.0;
    for (std::size_t k = 1; k < N; ++k) {
        power = power * e;
        fact *= static_cast<double>(k);
        out = out + (deriv(k) / fact) * power;
    }
    return out;
}

}  // namespace detail

template <std::size_t N>
Jet<N> cosh(const Jet<N>& x)
{
    const double ch = std::cosh(x.c[0]);
    const double sh = std::sinh(x.c[0]);
    return detail::compose(x, [&](std::size_t k) { return k % 2 == 0 ? ch : sh; });
}

template <std::size_t N>
Jet<N> sinh(const Jet<N>& x)
{
    const double ch = std::cosh(x.c[0]);
    const double sh = std::sinh(x.c[0]);
    return detail::compose(x, [&](std::size_t k) { return k % 2 == 0 ? sh : ch; });
}

}  // namespace willmore
