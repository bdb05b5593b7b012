#include "qsk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <Eigen/Dense>

namespace qsk {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
struct GaussRule {
    std::vector<double> x, w;
};

GaussRule gauss_legendre(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return r;
}

const GaussRule& rule64() {
    static const GaussRule r = gauss_legendre(64);
    return r;
}

const GaussRule& rule128() {
    static const GaussRule r = gauss_legendre(128);
    return r;
}

double factorial(int k) { return std::tgamma(k + 1.0); }

} // namespace

MomentSequence flat_metric_moments(double epsilon, int order) {
    if (order < 0) throw ConfigError("moment order must be >= 0");
    MomentSequence seq{epsilon, 0.0, {}};
    seq.values.resize(order + 1);
    double pw = 1.0;
    for (int i = 0; i <= order; ++i) {
        seq.values[i] = 2.0 * pw / ((i + 1.0) * (i + 2.0));
        pw *= epsilon;
    }
    return seq;
}

MomentSequence exp_metric_moments(double epsilon, double alpha, int order) {
    if (order < 0) throw ConfigError("moment order must be >= 0");
    if (alpha == 0.0)
        throw DomainError("alpha = 0 is the flat family; use flat_metric_moments");
    MomentSequence seq{epsilon, alpha, {}};
    seq.values.resize(order + 1);
    seq.values[0] = 1.0;
    double eps_pow = 1.0; // eps^{k-2} for k = 2
    for (int k = 2; k <= order + 1; ++k) {
        seq.values[k - 1] =
            (2.0 * k * (k - 1.0) * seq.values[k - 2] - 4.0 * eps_pow) / (k * alpha);
        eps_pow *= epsilon;
    }
    return seq;
}

BlurringDensity BlurringDensity::triangular(double epsilon) {
    if (epsilon == 0.0) throw DomainError("triangular blur degenerates at epsilon = 0");
    BlurringDensity b;
    if (epsilon > 0.0) {
        b.lo_ = 0.0;
        b.hi_ = epsilon;
        b.pdf_ = [epsilon](double y) {
            return (y < 0.0 || y > epsilon) ? 0.0 : 2.0 * (epsilon - y) / (epsilon * epsilon);
        };
    } else {
        b.lo_ = epsilon;
        b.hi_ = 0.0;
        b.pdf_ = [epsilon](double y) {
            return (y < epsilon || y > 0.0) ? 0.0 : 2.0 * (y - epsilon) / (epsilon * epsilon);
        };
    }
    return b;
}

BlurringDensity BlurringDensity::uniform(double lo, double hi) {
    if (!(lo < hi)) throw DomainError("uniform blur requires lo < hi");
    BlurringDensity b;
    b.lo_ = lo;
    b.hi_ = hi;
    const double d = 1.0 / (hi - lo);
    b.pdf_ = [lo, hi, d](double y) { return (y < lo || y > hi) ? 0.0 : d; };
    return b;
}

BlurringDensity BlurringDensity::point_mass(double at) {
    BlurringDensity b;
    b.lo_ = b.hi_ = at;
    b.point_ = true;
    return b;
}

BlurringDensity BlurringDensity::tabulated(std::vector<double> y, std::vector<double> h) {
    if (y.size() != h.size() || y.size() < 2) throw ConfigError("tabulated blur needs >= 2 nodes");
    for (std::size_t i = 1; i < y.size(); ++i)
        if (!(y[i] > y[i - 1])) throw ConfigError("tabulated blur nodes must increase");
    for (double v : h)
        if (v < 0.0) throw DomainError("blur density must be nonnegative");
    double mass = 0.0;
    for (std::size_t i = 1; i < y.size(); ++i)
        mass += 0.5 * (h[i] + h[i - 1]) * (y[i] - y[i - 1]);
    if (!(mass > 0.0)) throw DomainError("tabulated blur has zero mass");
    for (double& v : h) v /= mass;

    BlurringDensity b;
    b.lo_ = y.front();
    b.hi_ = y.back();
    auto ys = std::make_shared<std::vector<double>>(std::move(y));
    auto hs = std::make_shared<std::vector<double>>(std::move(h));
    b.pdf_ = [ys, hs](double yy) {
        if (yy < ys->front() || yy > ys->back()) return 0.0;
        const auto it = std::upper_bound(ys->begin(), ys->end(), yy);
        const std::size_t i = std::min<std::size_t>(ys->size() - 1,
                                                    std::max<std::ptrdiff_t>(1, it - ys->begin()));
        const double t = ((*ys)[i] - (*ys)[i - 1]) > 0 ? (yy - (*ys)[i - 1]) / ((*ys)[i] - (*ys)[i - 1]) : 0.0;
        return (1.0 - t) * (*hs)[i - 1] + t * (*hs)[i];
    };
    return b;
}

double BlurringDensity::pdf(double y) const {
    if (point_) throw DomainError("point-mass blur has no density");
    return pdf_(y);
}

double BlurringDensity::moment(int i) const {
    if (i < 0) throw ConfigError("moment order must be >= 0");
    if (point_) return std::pow(lo_, i);
    const auto& r = rule64();
    const double c = 0.5 * (hi_ + lo_), h = 0.5 * (hi_ - lo_);
    double s = 0.0;
    for (std::size_t q = 0; q < r.x.size(); ++q) {
        const double y = c + h * r.x[q];
        s += r.w[q] * std::pow(y, i) * pdf_(y);
    }
    return s * h;
}

std::vector<std::pair<double, double>> BlurringDensity::table(int n) const {
    if (point_) throw DomainError("point-mass blur has no density table");
    if (n < 2) throw ConfigError("table needs >= 2 nodes");
    std::vector<std::pair<double, double>> t(n);
    for (int i = 0; i < n; ++i) {
        const double y = lo_ + (hi_ - lo_) * i / (n - 1.0);
        t[i] = {y, pdf_(y)};
    }
    return t;
}

MetricProfile MetricProfile::flat() { return MetricProfile(); }

MetricProfile MetricProfile::exponential(double alpha, double x0) {
    MetricProfile m;
    m.kind_ = Kind::exp;
    m.alpha_ = alpha;
    m.x0_ = x0;
    return m;
}

MetricProfile MetricProfile::tabulated(std::vector<double> x, std::vector<double> g, double x0) {
    if (x.size() != g.size() || x.size() < 3) throw ConfigError("tabulated metric needs >= 3 nodes");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw ConfigError("tabulated metric nodes must increase");
    for (double v : g)
        if (!(v > 0.0)) throw DomainError("metric must be positive");
    MetricProfile m;
    m.kind_ = Kind::tab;
    m.x0_ = x0;
    m.tx_ = std::move(x);
    m.tg_ = std::move(g);
    return m;
}

double MetricProfile::interp_g(double x) const {
    if (x < tx_.front() || x > tx_.back())
        throw DomainError("x outside the tabulated metric range");
    const auto it = std::upper_bound(tx_.begin(), tx_.end(), x);
    const std::size_t i =
        std::min<std::size_t>(tx_.size() - 1, std::max<std::ptrdiff_t>(1, it - tx_.begin()));
    const double t = (x - tx_[i - 1]) / (tx_[i] - tx_[i - 1]);
    return (1.0 - t) * tg_[i - 1] + t * tg_[i];
}

double MetricProfile::g(double x) const {
    switch (kind_) {
        case Kind::flat: return 1.0;
        case Kind::exp: return std::exp(-alpha_ * x);
        case Kind::tab: return interp_g(x);
    }
    return 1.0;
}

double MetricProfile::g_inv(double x) const { return 1.0 / g(x); }

double MetricProfile::dg_inv(double x) const {
    switch (kind_) {
        case Kind::flat: return 0.0;
        case Kind::exp: return alpha_ * std::exp(alpha_ * x);
        case Kind::tab: {
            const double h = (tx_.back() - tx_.front()) / (tx_.size() - 1.0);
            const double xm = std::max(x - h, tx_.front());
            const double xp = std::min(x + h, tx_.back());
            return (1.0 / interp_g(xp) - 1.0 / interp_g(xm)) / (xp - xm);
        }
    }
    return 0.0;
}

PDECoefficients kramers_moyal_coefficients(const BlurringDensity& blur, const MetricProfile& metric,
                                           double sigma, int order,
                                           const std::vector<double>& x_grid) {
    if (order < 2) throw ConfigError("expansion order must be >= 2");
    if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");

    std::vector<double> H(order);
    for (int i = 0; i < order; ++i) H[i] = blur.moment(i);

    const double s2 = sigma * sigma;
    PDECoefficients out;
    out.x = x_grid;
    out.drift.resize(x_grid.size());
    out.diffusion.assign(order - 1, std::vector<double>(x_grid.size()));

    for (std::size_t j = 0; j < x_grid.size(); ++j) {
        const double x = x_grid[j];
        if (!(metric.g(x) > 0.0)) throw DomainError("metric must be positive on the grid");
        const double ginv = metric.g_inv(x);
        const double dginv = metric.dg_inv(x);
        out.drift[j] = 0.25 * s2 * dginv * H[0];
        for (int k = 2; k <= order; ++k) {
            const double sk = (k % 2 == 0) ? 1.0 : -1.0;
            double c = sk * ginv * H[k - 2] / factorial(k - 2);
            c += -sk * dginv * H[k - 1] / (2.0 * factorial(k - 1));
            out.diffusion[k - 2][j] = 0.5 * s2 * c;
        }
    }
    return out;
}

ConnectionTerms connection_terms(const MetricProfile& metric, const std::vector<double>& x_grid) {
    ConnectionTerms out;
    out.x = x_grid;
    out.a_x.resize(x_grid.size());
    out.q.resize(x_grid.size());

    // w = g^{-1/2}; A = -sqrt(g) w'; Q = -A^2/g - A'/g.
    auto w_of = [&](double x) {
        const double g = metric.g(x);
        if (!(g > 0.0)) throw DomainError("metric must be positive");
        return 1.0 / std::sqrt(g);
    };
    auto a_of = [&](double x) {
        if (metric.closed_form()) {
            // A = -sqrt(g) d(g^{-1/2})/dx = -(g/2) d(g^{-1})/dx
            // (flat: 0; exponential: -alpha/2, constant)
            return -0.5 * metric.g(x) * metric.dg_inv(x);
        }
        const double h = 1e-5 * (1.0 + std::abs(x));
        return -std::sqrt(metric.g(x)) * (w_of(x + h) - w_of(x - h)) / (2.0 * h);
    };
    for (std::size_t j = 0; j < x_grid.size(); ++j) {
        const double x = x_grid[j];
        const double g = metric.g(x);
        if (!(g > 0.0)) throw DomainError("metric must be positive on the grid");
        const double a = a_of(x);
        const double h = 1e-5 * (1.0 + std::abs(x));
        const double da = (a_of(x + h) - a_of(x - h)) / (2.0 * h);
        out.a_x[j] = a;
        out.q[j] = -a * a / g - da / g;
    }
    return out;
}

double coordinate_transform(const MetricProfile& metric, double x) {
    const double x0 = metric.x0();
    // composite Simpson on g^{-1/2}
    const int n = 512; // even
    const double h = (x - x0) / n;
    if (h == 0.0) return 0.0;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double xi = x0 + i * h;
        const double g = metric.g(xi);
        if (!(g > 0.0)) throw DomainError("metric must be positive on the integration path");
        const double f = 1.0 / std::sqrt(g);
        s += (i == 0 || i == n) ? f : ((i % 2 == 1) ? 4.0 * f : 2.0 * f);
    }
    return s * h / 3.0;
}

MetricFit fit_metric_weights(const BlurringDensity& blur, double epsilon, int order) {
    if (order < 0) throw ConfigError("order must be >= 0");
    if (order > 12) throw ConfigError("order capped at 12 for conditioning");

    const double scale = (epsilon != 0.0) ? std::abs(epsilon)
                                          : std::max({std::abs(blur.support_lo()),
                                                      std::abs(blur.support_hi()), 1.0});
    const int n_eq = order + 1;

    // Quadrature nodes and the moment matrix in scaled coordinates.
    std::vector<double> ys, quad_h; // node and H(y)*gl_weight
    if (blur.is_point_mass()) {
        ys = {blur.support_lo()};
        quad_h = {1.0};
    } else {
        const auto& r = rule128();
        const double c = 0.5 * (blur.support_hi() + blur.support_lo());
        const double hw = 0.5 * (blur.support_hi() - blur.support_lo());
        for (std::size_t q = 0; q < r.x.size(); ++q) {
            const double y = c + hw * r.x[q];
            ys.push_back(y);
            quad_h.push_back(r.w[q] * hw * blur.pdf(y));
        }
    }
    const int m = static_cast<int>(ys.size());

    Eigen::MatrixXd A(n_eq, m);
    Eigen::VectorXd b(n_eq);
    for (int i = 0; i < n_eq; ++i) {
        for (int j = 0; j < m; ++j) A(i, j) = quad_h[j] * std::pow(ys[j] / scale, i);
        b(i) = 2.0 * std::pow(epsilon / scale, i) / ((i + 1.0) * (i + 2.0));
    }

    // Regularized nonnegative least squares (Lawson-Hanson active set) on
    // min ||A w - b||^2 + lambda ||w - 1||^2, w >= 0.
    const double lambda = 1e-10;
    const double sql = std::sqrt(lambda);
    Eigen::MatrixXd Aa(n_eq + m, m);
    Eigen::VectorXd ba(n_eq + m);
    Aa.topRows(n_eq) = A;
    ba.head(n_eq) = b;
    Aa.bottomRows(m) = sql * Eigen::MatrixXd::Identity(m, m);
    ba.tail(m) = sql * Eigen::VectorXd::Ones(m);

    Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
    std::vector<bool> passive(m, false);
    Eigen::VectorXd grad = Aa.transpose() * (ba - Aa * w);
    for (int iter = 0; iter < 4 * m; ++iter) {
        // most violated KKT multiplier among the active set
        int best = -1;
        double best_g = 1e-12;
        for (int j = 0; j < m; ++j)
            if (!passive[j] && grad(j) > best_g) {
                best_g = grad(j);
                best = j;
            }
        if (best < 0) break;
        passive[best] = true;

        for (int inner = 0; inner < 4 * m; ++inner) {
            std::vector<int> idx;
            for (int j = 0; j < m; ++j)
                if (passive[j]) idx.push_back(j);
            Eigen::MatrixXd Ap(Aa.rows(), idx.size());
            for (std::size_t c = 0; c < idx.size(); ++c) Ap.col(c) = Aa.col(idx[c]);
            Eigen::VectorXd z = Ap.colPivHouseholderQr().solve(ba);
            if ((z.array() > 0.0).all()) {
                w.setZero();
                for (std::size_t c = 0; c < idx.size(); ++c) w(idx[c]) = z(c);
                break;
            }
            // step toward z until the first passive variable hits zero
            double alpha = 1.0;
            for (std::size_t c = 0; c < idx.size(); ++c)
                if (z(c) <= 0.0)
                    alpha = std::min(alpha, w(idx[c]) / (w(idx[c]) - z(c)));
            for (std::size_t c = 0; c < idx.size(); ++c) {
                w(idx[c]) += alpha * (z(c) - w(idx[c]));
                if (w(idx[c]) <= 1e-14) {
                    w(idx[c]) = 0.0;
                    passive[idx[c]] = false;
                }
            }
        }
        grad = Aa.transpose() * (ba - Aa * w);
    }

    MetricFit fit;
    fit.y = ys;
    fit.w.assign(w.data(), w.data() + m);
    Eigen::VectorXd r = A * w - b;
    fit.residuals.assign(r.data(), r.data() + n_eq);
    fit.tolerance = 1e-8;
    fit.feasible = r.lpNorm<Eigen::Infinity>() <= fit.tolerance;
    return fit;
}

} // namespace qsk
