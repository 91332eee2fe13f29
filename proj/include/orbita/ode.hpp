#ifndef ORBITA_ODE_HPP
#define ORBITA_ODE_HPP

// Generic explicit Runge-Kutta integration of y' = f(t, y) on fixed-size
// state vectors: Dormand-Prince 8(5,3) with step-size control, and the
// classical fixed-step RK4 for convergence studies.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "orbita/error.hpp"

namespace orbita::ode {

template <std::size_t N>
using State = std::array<double, N>;

enum class Method { adaptive, fixed };

struct Options {
    Method method = Method::adaptive;
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    double fixed_step = 1e-3;       ///< step for Method::fixed
    double output_interval = 0.0;   ///< 0 records every step, otherwise a uniform time grid
    std::size_t max_steps = 10'000'000;
};

template <std::size_t N>
struct Sample {
    double t = 0.0;
    State<N> y{};
};

struct Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
};

template <std::size_t N>
struct Solution {
    std::vector<Sample<N>> samples;
    Stats stats;
    /// Set when an event function crossed zero upward; integration stops there.
    std::optional<Sample<N>> event;
};

/// Returns false for states the right-hand side must not be evaluated at.
template <std::size_t N>
using Guard = std::function<bool(const State<N>&)>;

/// Event function; a crossing from negative to non-negative stops integration.
template <std::size_t N>
using EventFn = std::function<double(double, const State<N>&)>;

namespace detail {

// Dormand-Prince 8(5,3) coefficients (Hairer, Norsett & Wanner, DOP853).
namespace dp {
inline constexpr double c2 = 0.526001519587677318785587544488e-01;
inline constexpr double c3 = 0.789002279381515978178381316732e-01;
inline constexpr double c4 = 0.118350341907227396726757197510e+00;
inline constexpr double c5 = 0.281649658092772603273242802490e+00;
inline constexpr double c6 = 0.333333333333333333333333333333e+00;
inline constexpr double c7 = 0.25e+00;
inline constexpr double c8 = 0.307692307692307692307692307692e+00;
inline constexpr double c9 = 0.651282051282051282051282051282e+00;
inline constexpr double c10 = 0.6e+00;
inline constexpr double c11 = 0.857142857142857142857142857142e+00;

inline constexpr double a21 = 5.26001519587677318785587544488e-2;
inline constexpr double a31 = 1.97250569845378994544595329183e-2;
inline constexpr double a32 = 5.91751709536136983633785987549e-2;
inline constexpr double a41 = 2.95875854768068491816892993775e-2;
inline constexpr double a43 = 8.87627564304205475450678981324e-2;
inline constexpr double a51 = 2.41365134159266685502369798665e-1;
inline constexpr double a53 = -8.84549479328286085344864962717e-1;
inline constexpr double a54 = 9.24834003261792003115737966543e-1;
inline constexpr double a61 = 3.7037037037037037037037037037e-2;
inline constexpr double a64 = 1.70828608729473871279604482173e-1;
inline constexpr double a65 = 1.25467687566822425016691814123e-1;
inline constexpr double a71 = 3.7109375e-2;
inline constexpr double a74 = 1.70252211019544039314978060272e-1;
inline constexpr double a75 = 6.02165389804559606850219397283e-2;
inline constexpr double a76 = -1.7578125e-2;
inline constexpr double a81 = 3.70920001185047927108779319836e-2;
inline constexpr double a84 = 1.70383925712239993810214054705e-1;
inline constexpr double a85 = 1.07262030446373284651809199168e-1;
inline constexpr double a86 = -1.53194377486244017527936158236e-2;
inline constexpr double a87 = 8.27378916381402288758473766002e-3;
inline constexpr double a91 = 6.24110958716075717114429577812e-1;
inline constexpr double a94 = -3.36089262944694129406857109825e0;
inline constexpr double a95 = -8.68219346841726006818189891453e-1;
inline constexpr double a96 = 2.75920996994467083049415600797e1;
inline constexpr double a97 = 2.01540675504778934086186788979e1;
inline constexpr double a98 = -4.34898841810699588477366255144e1;
inline constexpr double a101 = 4.77662536438264365890433908527e-1;
inline constexpr double a104 = -2.48811461997166764192642586468e0;
inline constexpr double a105 = -5.90290826836842996371446475743e-1;
inline constexpr double a106 = 2.12300514481811942347288949897e1;
inline constexpr double a107 = 1.52792336328824235832596922938e1;
inline constexpr double a108 = -3.32882109689848629194453265587e1;
inline constexpr double a109 = -2.03312017085086261358222928593e-2;
inline constexpr double a111 = -9.3714243008598732571704021658e-1;
inline constexpr double a114 = 5.18637242884406370830023853209e0;
inline constexpr double a115 = 1.09143734899672957818500254654e0;
inline constexpr double a116 = -8.14978701074692612513997267357e0;
inline constexpr double a117 = -1.85200656599969598641566180701e1;
inline constexpr double a118 = 2.27394870993505042818970056734e1;
inline constexpr double a119 = 2.49360555267965238987089396762e0;
inline constexpr double a1110 = -3.0467644718982195003823669022e0;
inline constexpr double a121 = 2.27331014751653820792359768449e0;
inline constexpr double a124 = -1.05344954667372501984066689879e1;
inline constexpr double a125 = -2.00087205822486249909675718444e0;
inline constexpr double a126 = -1.79589318631187989172765950534e1;
inline constexpr double a127 = 2.79488845294199600508499808837e1;
inline constexpr double a128 = -2.85899827713502369474065508674e0;
inline constexpr double a129 = -8.87285693353062954433549289258e0;
inline constexpr double a1210 = 1.23605671757943030647266201528e1;
inline constexpr double a1211 = 6.43392746015763530355970484046e-1;

inline constexpr double b1 = 5.42937341165687622380535766363e-2;
inline constexpr double b6 = 4.45031289275240888144113950566e0;
inline constexpr double b7 = 1.89151789931450038304281599044e0;
inline constexpr double b8 = -5.8012039600105847814672114227e0;
inline constexpr double b9 = 3.1116436695781989440891606237e-1;
inline constexpr double b10 = -1.52160949662516078556178806805e-1;
inline constexpr double b11 = 2.01365400804030348374776537501e-1;
inline constexpr double b12 = 4.47106157277725905176885569043e-2;

inline constexpr double bhh1 = 0.244094488188976377952755905512e+00;
inline constexpr double bhh2 = 0.733846688281611857341361741547e+00;
inline constexpr double bhh3 = 0.220588235294117647058823529412e-01;

inline constexpr double er1 = 0.1312004499419488073250102996e-01;
inline constexpr double er6 = -0.1225156446376204440720569753e+01;
inline constexpr double er7 = -0.4957589496572501915214079952e+00;
inline constexpr double er8 = 0.1664377182454986536961530415e+01;
inline constexpr double er9 = -0.3503288487499736816886487290e+00;
inline constexpr double er10 = 0.3341791187130174790297318841e+00;
inline constexpr double er11 = 0.8192320648511571246570742613e-01;
inline constexpr double er12 = -0.2235530786388629525884427845e-01;
}  // namespace dp

template <std::size_t N>
struct StepResult {
    State<N> y{};
    double error = 0.0;  ///< scaled error norm; <= 1 means acceptable
    bool guarded = false;  ///< a stage state was rejected by the guard
};

template <std::size_t N, class Fn>
State<N> axpy(const State<N>& y, double h, Fn&& combine) {
    State<N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = y[i] + h * combine(i);
    }
    return out;
}

template <std::size_t N, class Rhs>
StepResult<N> dop853_step(Rhs& f, double t, const State<N>& y, const State<N>& k1, double h,
                          const Options& opt, const Guard<N>& guard, Stats& stats) {
    using namespace dp;
    StepResult<N> res;
    auto eval = [&](double tt, const State<N>& yy, State<N>& k) {
        if (guard && !guard(yy)) {
            res.guarded = true;
            return false;
        }
        k = f(tt, yy);
        ++stats.evaluations;
        return true;
    };

    State<N> k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12;
    if (!eval(t + c2 * h, axpy<N>(y, h, [&](std::size_t i) { return a21 * k1[i]; }), k2)) return res;
    if (!eval(t + c3 * h, axpy<N>(y, h, [&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; }), k3)) return res;
    if (!eval(t + c4 * h, axpy<N>(y, h, [&](std::size_t i) { return a41 * k1[i] + a43 * k3[i]; }), k4)) return res;
    if (!eval(t + c5 * h, axpy<N>(y, h, [&](std::size_t i) {
            return a51 * k1[i] + a53 * k3[i] + a54 * k4[i]; }), k5)) return res;
    if (!eval(t + c6 * h, axpy<N>(y, h, [&](std::size_t i) {
            return a61 * k1[i] + a64 * k4[i] + a65 * k5[i]; }), k6)) return res;
    if (!eval(t + c7 * h, axpy<N>(y, h, [&](std::size_t i) {
            return a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]; }), k7)) return res;
    if (!eval(t + c8 * h, axpy<N>(y, h, [&](std::size_t i) {
            return a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i]; }), k8)) return res;
    if (!eval(t + c9 * h, axpy<N>(y, h, [&](std::size_t i) {
            return a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] + a97 * k7[i] + a98 * k8[i];
        }), k9)) return res;
    if (!eval(t + c10 * h, axpy<N>(y, h, [&](std::size_t i) {
            return a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] + a107 * k7[i] +
                   a108 * k8[i] + a109 * k9[i];
        }), k10)) return res;
    if (!eval(t + c11 * h, axpy<N>(y, h, [&](std::size_t i) {
            return a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] + a117 * k7[i] +
                   a118 * k8[i] + a119 * k9[i] + a1110 * k10[i];
        }), k11)) return res;
    if (!eval(t + h, axpy<N>(y, h, [&](std::size_t i) {
            return a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] + a127 * k7[i] +
                   a128 * k8[i] + a129 * k9[i] + a1210 * k10[i] + a1211 * k11[i];
        }), k12)) return res;

    double err5 = 0.0;
    double err3 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double incr = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] +
                            b10 * k10[i] + b11 * k11[i] + b12 * k12[i];
        res.y[i] = y[i] + h * incr;
        const double sk = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(res.y[i]));
        const double e3 = (incr - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * k12[i]) / sk;
        const double e5 = (er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] + er9 * k9[i] +
                           er10 * k10[i] + er11 * k11[i] + er12 * k12[i]) / sk;
        err3 += e3 * e3;
        err5 += e5 * e5;
    }
    double deno = err5 + 0.01 * err3;
    if (deno <= 0.0) {
        deno = 1.0;
    }
    res.error = std::abs(h) * err5 * std::sqrt(1.0 / (static_cast<double>(N) * deno));
    if (!std::isfinite(res.error)) {
        res.error = std::numeric_limits<double>::infinity();
    }
    return res;
}

template <std::size_t N, class Rhs>
StepResult<N> rk4_step(Rhs& f, double t, const State<N>& y, const State<N>& k1, double h,
                       const Guard<N>& guard, Stats& stats) {
    StepResult<N> res;
    auto eval = [&](double tt, const State<N>& yy, State<N>& k) {
        if (guard && !guard(yy)) {
            res.guarded = true;
            return false;
        }
        k = f(tt, yy);
        ++stats.evaluations;
        return true;
    };
    State<N> k2, k3, k4;
    if (!eval(t + 0.5 * h, axpy<N>(y, 0.5 * h, [&](std::size_t i) { return k1[i]; }), k2)) return res;
    if (!eval(t + 0.5 * h, axpy<N>(y, 0.5 * h, [&](std::size_t i) { return k2[i]; }), k3)) return res;
    if (!eval(t + h, axpy<N>(y, h, [&](std::size_t i) { return k3[i]; }), k4)) return res;
    res.y = axpy<N>(y, h / 6.0, [&](std::size_t i) { return k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]; });
    return res;
}

// Initial step guess (Hairer's hinit) for a method of the given order.
template <std::size_t N, class Rhs>
double initial_step(Rhs& f, double t, const State<N>& y, const State<N>& k1, double hmax,
                    const Options& opt, int order, Stats& stats) {
    double dnf = 0.0;
    double dny = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double sk = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
        dnf += (k1[i] / sk) * (k1[i] / sk);
        dny += (y[i] / sk) * (y[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1.0e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, hmax);
    const State<N> y1 = axpy<N>(y, h, [&](std::size_t i) { return k1[i]; });
    const State<N> k2 = f(t + h, y1);
    ++stats.evaluations;
    double der2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double sk = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
        const double d = (k2[i] - k1[i]) / sk;
        der2 += d * d;
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(der2, std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1.0e-6, std::abs(h) * 1.0e-3)
                                     : std::pow(0.01 / der12, 1.0 / order);
    return std::min({100.0 * h, h1, hmax});
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 over `duration` (> 0).
///
/// `guard` vetoes states (e.g. too close to a singularity): a vetoed stage
/// shrinks the step, a vetoed accepted state raises IntegrationError with
/// Kind::collision. `event`, when given, stops integration at its first
/// upward zero crossing, located by bisection on the step length.
template <std::size_t N, class Rhs>
Solution<N> integrate(Rhs&& f, const State<N>& y0, double t0, double duration, const Options& opt,
                      const Guard<N>& guard = {}, const EventFn<N>& event = {}) {
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw DomainError("integrate: duration must be positive and finite");
    }
    if (opt.method == Method::adaptive && !(opt.rel_tol > 0.0 && opt.abs_tol > 0.0)) {
        throw DomainError("integrate: tolerances must be positive");
    }
    if (opt.method == Method::fixed && !(opt.fixed_step > 0.0)) {
        throw DomainError("integrate: fixed step must be positive");
    }
    if (opt.max_steps == 0) {
        throw DomainError("integrate: max_steps must be positive");
    }
    if (guard && !guard(y0)) {
        throw IntegrationError(IntegrationError::Kind::collision, "integrate: initial state rejected by guard");
    }

    constexpr double kUround = std::numeric_limits<double>::epsilon();
    constexpr int kMaxGuardRetries = 12;
    const bool adaptive = opt.method == Method::adaptive;
    const double t_end = t0 + duration;

    Solution<N> sol;
    sol.samples.push_back({t0, y0});

    double t = t0;
    State<N> y = y0;
    State<N> k1 = f(t, y);
    ++sol.stats.evaluations;

    double h = adaptive ? detail::initial_step<N>(f, t, y, k1, duration, opt, 8, sol.stats)
                        : opt.fixed_step;
    std::size_t next_output = 1;
    auto output_time = [&](std::size_t k) {
        return std::min(t0 + static_cast<double>(k) * opt.output_interval, t_end);
    };

    double g_prev = event ? event(t, y) : 0.0;
    bool reject = false;
    int guard_retries = 0;

    auto take_step = [&](double tt, const State<N>& yy, const State<N>& kk, double hh) {
        return adaptive ? detail::dop853_step<N>(f, tt, yy, kk, hh, opt, guard, sol.stats)
                        : detail::rk4_step<N>(f, tt, yy, kk, hh, guard, sol.stats);
    };

    while (t < t_end) {
        if (sol.stats.accepted + sol.stats.rejected >= opt.max_steps) {
            throw IntegrationError(IntegrationError::Kind::step_limit,
                                   "integrate: step limit of " + std::to_string(opt.max_steps) + " exceeded");
        }
        double target = t_end;
        if (opt.output_interval > 0.0) {
            target = output_time(next_output);
        }
        const double h_proposed = h;
        bool lands = false;
        double h_try = h;
        if (t + h_try >= target || target - (t + h_try) <= 16.0 * kUround * std::abs(target)) {
            h_try = target - t;
            lands = true;
        }
        if (h_try <= 16.0 * kUround * std::max(std::abs(t), 1.0) * 1e-2 && !lands) {
            throw IntegrationError(IntegrationError::Kind::step_underflow,
                                   "integrate: step size underflow at t = " + std::to_string(t));
        }

        detail::StepResult<N> step = take_step(t, y, k1, h_try);
        if (step.guarded) {
            if (++guard_retries > kMaxGuardRetries) {
                throw IntegrationError(IntegrationError::Kind::collision,
                                       "integrate: trajectory reached the guarded region near t = " +
                                           std::to_string(t));
            }
            h = 0.25 * h_try;
            reject = true;
            ++sol.stats.rejected;
            continue;
        }

        if (adaptive && step.error > 1.0) {
            const double fac = std::max(0.9 * std::pow(step.error, -0.125), 1.0 / 3.0);
            h = h_try * std::min(fac, 1.0);
            if (h <= 16.0 * kUround * std::max(std::abs(t), 1.0) * 1e-2) {
                throw IntegrationError(IntegrationError::Kind::step_underflow,
                                       "integrate: step size underflow at t = " + std::to_string(t));
            }
            reject = true;
            ++sol.stats.rejected;
            continue;
        }
        guard_retries = 0;

        if (guard && !guard(step.y)) {
            throw IntegrationError(IntegrationError::Kind::collision,
                                   "integrate: collision near t = " + std::to_string(t + h_try));
        }

        const double t_new = lands ? target : t + h_try;
        ++sol.stats.accepted;

        if (event) {
            const double g_new = event(t_new, step.y);
            if (g_prev < 0.0 && g_new >= 0.0) {
                double lo = 0.0;
                double hi = h_try;
                State<N> y_hi = step.y;
                for (int it = 0; it < 200 && hi - lo > 4.0 * kUround * std::max(std::abs(t + hi), 1.0); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const detail::StepResult<N> sub = take_step(t, y, k1, mid);
                    if (sub.guarded) {
                        break;
                    }
                    if (event(t + mid, sub.y) < 0.0) {
                        lo = mid;
                    } else {
                        hi = mid;
                        y_hi = sub.y;
                    }
                }
                Sample<N> ev{t + hi, y_hi};
                sol.event = ev;
                if (ev.t > sol.samples.back().t) {
                    sol.samples.push_back(ev);
                } else {
                    sol.samples.back() = ev;
                }
                return sol;
            }
            g_prev = g_new;
        }

        if (adaptive) {
            const double err = std::max(step.error, 1e-300);
            double fac = 0.9 * std::pow(err, -0.125);
            fac = std::clamp(fac, 1.0 / 3.0, 6.0);
            double h_next = (lands ? std::max(h_proposed, h_try) : h_try) * fac;
            if (reject) {
                h_next = std::min(h_next, h_try);
            }
            h = std::min(h_next, duration);
        } else {
            h = opt.fixed_step;
        }
        reject = false;

        t = t_new;
        y = step.y;
        k1 = f(t, y);
        ++sol.stats.evaluations;

        if (opt.output_interval > 0.0) {
            if (lands) {
                sol.samples.push_back({t, y});
                ++next_output;
            }
        } else {
            sol.samples.push_back({t, y});
        }
    }
    return sol;
}

}  // namespace orbita::ode

#endif  // ORBITA_ODE_HPP
