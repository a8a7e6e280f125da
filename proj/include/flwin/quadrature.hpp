#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "flwin/errors.hpp"

namespace flwin {

struct QuadratureOptions {
    double abs_tol = 1e-8;
    /// Relative tolerance against a coarse first estimate of the integral;
    /// the effective target is max(abs_tol, rel_tol * |estimate|).
    double rel_tol = 0.0;
    std::size_t max_intervals = std::size_t{1} << 18;
    int initial_panels = 16;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t intervals = 0;
};

/// Adaptive Simpson quadrature of f over [a, b].
///
/// The range is first cut into `initial_panels` panels (geometrically spaced
/// when 0 < a and b/a > 10, which suits integrands with power-law decay), then
/// each panel is bisected until |S2 - S1| <= 15 * tol_panel, with tol_panel
/// proportional to the panel width. Accepted panels contribute the Richardson
/// value S2 + (S2 - S1)/15 and |S2 - S1|/15 to the error estimate.
/// Throws NumericalError if more than max_intervals panels are needed.
template <class F>
QuadratureResult integrate_adaptive_simpson(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
    QuadratureResult out;
    if (a == b) return out;
    if (!(a < b)) {
        QuadratureResult r = integrate_adaptive_simpson(f, b, a, opts);
        r.value = -r.value;
        return r;
    }

    struct Panel {
        double a, b, fa, fm, fb, whole, tol;
    };

    const int n0 = opts.initial_panels > 0 ? opts.initial_panels : 1;
    std::vector<double> edges(static_cast<std::size_t>(n0) + 1);
    const bool geometric = a > 0.0 && b / a > 10.0;
    for (int k = 0; k <= n0; ++k) {
        const double t = static_cast<double>(k) / n0;
        edges[static_cast<std::size_t>(k)] = geometric ? a * std::pow(b / a, t) : a + (b - a) * t;
    }
    edges.front() = a;
    edges.back() = b;

    std::vector<Panel> stack;
    stack.reserve(64);
    double coarse = 0.0;
    std::vector<Panel> initial;
    initial.reserve(static_cast<std::size_t>(n0));
    double f_left = f(a);
    for (int k = 0; k < n0; ++k) {
        const double pa = edges[static_cast<std::size_t>(k)];
        const double pb = edges[static_cast<std::size_t>(k) + 1];
        const double pm = 0.5 * (pa + pb);
        const double fm = f(pm);
        const double fb = f(pb);
        const double s = (pb - pa) / 6.0 * (f_left + 4.0 * fm + fb);
        coarse += s;
        initial.push_back({pa, pb, f_left, fm, fb, s, 0.0});
        f_left = fb;
    }
    const double tol = std::max(opts.abs_tol, opts.rel_tol * std::fabs(coarse));
    for (auto it = initial.rbegin(); it != initial.rend(); ++it) {
        it->tol = tol * (it->b - it->a) / (b - a);
        stack.push_back(*it);
    }

    std::size_t intervals = static_cast<std::size_t>(n0);
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const double m = 0.5 * (p.a + p.b);
        const double lm = 0.5 * (p.a + m);
        const double rm = 0.5 * (m + p.b);
        const double flm = f(lm);
        const double frm = f(rm);
        const double left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
        const double right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
        const double delta = left + right - p.whole;
        // Panels that cannot be split further in floating point are accepted as is.
        const bool exhausted = !(lm > p.a && m > lm && rm > m && p.b > rm);
        if (std::fabs(delta) <= 15.0 * p.tol || exhausted) {
            out.value += left + right + delta / 15.0;
            out.error_estimate += std::fabs(delta) / 15.0;
            continue;
        }
        if (++intervals > opts.max_intervals) {
            throw NumericalError("adaptive quadrature exceeded " + std::to_string(opts.max_intervals) +
                                     " subdivisions; accumulated error " +
                                     std::to_string(out.error_estimate + std::fabs(delta) / 15.0),
                                 out.error_estimate + std::fabs(delta) / 15.0);
        }
        stack.push_back({m, p.b, p.fm, frm, p.fb, right, 0.5 * p.tol});
        stack.push_back({p.a, m, p.fa, flm, p.fm, left, 0.5 * p.tol});
    }
    out.intervals = intervals;
    return out;
}

}  // namespace flwin
