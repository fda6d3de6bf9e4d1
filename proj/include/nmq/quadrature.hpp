// quadrature.hpp — Gauss-Legendre rules, composite grids, adaptive Gauss-Kronrod,
// and principal-value integrals on a compact band.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "nmq/errors.hpp"

namespace nmq::quad {

struct Rule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

// Gauss-Legendre on [-1,1], nodes by Newton iteration on P_n.
inline Rule gauss_legendre(int n) {
    if (n < 1) throw Error("gauss_legendre: need n >= 1");
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence for P_n(x) and P'_n(x)
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes(i) = -x;
        r.nodes(n - 1 - i) = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.weights(i) = w;
        r.weights(n - 1 - i) = w;
    }
    return r;
}

inline Rule gauss_legendre(int n, double a, double b) {
    Rule r = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    r.nodes = (c + h * r.nodes.array()).matrix();
    r.weights *= h;
    return r;
}

// Composite Gauss-Legendre over panels defined by interior split points.
// Points are distributed proportionally to panel length with a floor per panel.
inline Rule composite_gauss_legendre(double a, double b, std::vector<double> splits, int total_points,
                                     int min_per_panel = 32) {
    splits.push_back(a);
    splits.push_back(b);
    std::sort(splits.begin(), splits.end());
    std::vector<double> edges;
    for (double s : splits) {
        if (s < a + 1e-300 || s > b - 1e-300) continue;
        if (s <= a || s >= b) continue;
        if (!edges.empty() && std::abs(s - edges.back()) < 1e-12 * (b - a)) continue;
        edges.push_back(s);
    }
    edges.insert(edges.begin(), a);
    edges.push_back(b);

    const double span = b - a;
    std::vector<Rule> panels;
    int used = 0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double len = edges[i + 1] - edges[i];
        int n = std::max(min_per_panel, static_cast<int>(std::lround(total_points * len / span)));
        panels.push_back(gauss_legendre(n, edges[i], edges[i + 1]));
        used += n;
    }
    Rule out;
    out.nodes.resize(used);
    out.weights.resize(used);
    int pos = 0;
    for (const auto& p : panels) {
        out.nodes.segment(pos, p.nodes.size()) = p.nodes;
        out.weights.segment(pos, p.nodes.size()) = p.weights;
        pos += static_cast<int>(p.nodes.size());
    }
    return out;
}

template <class F>
auto integrate(const Rule& r, F&& f) -> decltype(f(0.0)) {
    auto acc = f(r.nodes(0)) * r.weights(0);
    for (int i = 1; i < r.nodes.size(); ++i) acc += f(r.nodes(i)) * r.weights(i);
    return acc;
}

namespace detail {

inline double scalar_norm(double x) { return std::abs(x); }
inline double scalar_norm(const std::complex<double>& x) { return std::abs(x); }
inline double scalar_norm(const Eigen::MatrixXcd& x) { return x.norm(); }

// QK15 constants (7-point Gauss embedded in 15-point Kronrod).
inline const double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
                               0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline const double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
                               0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline const double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class T, class F>
void gk15(F&& f, double a, double b, T& result, double& err, double& resabs) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    T fc = f(c);
    T resk = kWgk[7] * fc;
    T resg = kWg[3] * fc;
    resabs = kWgk[7] * scalar_norm(fc);
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        T f1 = f(c - dx);
        T f2 = f(c + dx);
        resk += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (scalar_norm(f1) + scalar_norm(f2));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    result = resk * h;
    resabs *= std::abs(h);
    err = scalar_norm(T((resk - resg) * h));
}

template <class T, class F>
void adaptive_rec(F&& f, double a, double b, double tol, int depth, T& acc) {
    T val;
    double err, resabs;
    gk15<T>(f, a, b, val, err, resabs);
    // the 100*eps*resabs term guards against subdividing past the roundoff floor
    if (err <= tol || err <= 100.0 * std::numeric_limits<double>::epsilon() * resabs || depth >= 40 ||
        (b - a) < 1e-14 * (std::abs(a) + std::abs(b) + 1.0)) {
        acc += val;
        return;
    }
    const double m = 0.5 * (a + b);
    adaptive_rec<T>(f, a, m, 0.5 * tol, depth + 1, acc);
    adaptive_rec<T>(f, m, b, 0.5 * tol, depth + 1, acc);
}

}  // namespace detail

// Adaptive Gauss-Kronrod with absolute tolerance. T may be double, complex, or MatrixXcd.
template <class T, class F>
T adaptive_gk(F&& f, double a, double b, double abs_tol) {
    T acc = f(0.5 * (a + b)) * 0.0;  // zero of the right shape
    if (b <= a) return acc;
    detail::adaptive_rec<T>(f, a, b, abs_tol, 0, acc);
    return acc;
}

// PV integral of f(x)/(x - x0) over [a,b] with x0 strictly inside:
// subtract the singular part analytically,
//   PV ∫ f/(x-x0) = ∫ (f(x)-f(x0))/(x-x0) dx + f(x0) log((b-x0)/(x0-a)).
inline double principal_value(const std::function<double(double)>& f, double x0, double a, double b,
                              double abs_tol = 1e-11) {
    if (!(x0 > a && x0 < b)) throw Error("principal_value: pole must lie inside the interval");
    const double f0 = f(x0);
    auto g = [&](double x) -> double {
        const double d = x - x0;
        if (std::abs(d) < 1e-9) {
            // symmetric difference quotient, robust at the removable singularity
            const double h = 1e-6 * (b - a);
            return (f(x0 + h) - f(x0 - h)) / (2.0 * h);
        }
        return (f(x) - f0) / d;
    };
    double v = adaptive_gk<double>(g, a, x0, abs_tol * 0.5) + adaptive_gk<double>(g, x0, b, abs_tol * 0.5);
    return v + f0 * std::log((b - x0) / (x0 - a));
}

}  // namespace nmq::quad
