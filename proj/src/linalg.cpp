#include "mpclo/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace mpclo {

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double dot(const Vec& x, const Vec& y) {
    assert(x.size() == y.size());
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

double norm_inf(const Vec& x) {
    double s = 0.0;
    for (double v : x) s = std::max(s, std::fabs(v));
    return s;
}

double max_abs(const Mat& m) {
    double s = 0.0;
    for (double v : m.a) s = std::max(s, std::fabs(v));
    return s;
}

Vec operator+(const Vec& x, const Vec& y) {
    Vec r = x;
    for (size_t i = 0; i < r.size(); ++i) r[i] += y[i];
    return r;
}

Vec operator-(const Vec& x, const Vec& y) {
    Vec r = x;
    for (size_t i = 0; i < r.size(); ++i) r[i] -= y[i];
    return r;
}

Vec operator*(double t, const Vec& x) {
    Vec r = x;
    for (double& v : r) v *= t;
    return r;
}

void axpy(double t, const Vec& x, Vec& y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += t * x[i];
}

Vec matvec(const Mat& m, const Vec& x) {
    assert(static_cast<int>(x.size()) == m.cols);
    Vec r(m.rows, 0.0);
    for (int i = 0; i < m.rows; ++i) {
        double s = 0.0;
        auto row = m.row(i);
        for (int j = 0; j < m.cols; ++j) s += row[j] * x[j];
        r[i] = s;
    }
    return r;
}

Vec matvec_t(const Mat& m, const Vec& x) {
    assert(static_cast<int>(x.size()) == m.rows);
    Vec r(m.cols, 0.0);
    for (int i = 0; i < m.rows; ++i) {
        auto row = m.row(i);
        for (int j = 0; j < m.cols; ++j) r[j] += row[j] * x[i];
    }
    return r;
}

Mat matmul(const Mat& lhs, const Mat& rhs) {
    assert(lhs.cols == rhs.rows);
    Mat r(lhs.rows, rhs.cols);
    for (int i = 0; i < lhs.rows; ++i)
        for (int k = 0; k < lhs.cols; ++k) {
            double v = lhs(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < rhs.cols; ++j) r(i, j) += v * rhs(k, j);
        }
    return r;
}

Mat matmul_nt(const Mat& lhs, const Mat& rhs) {
    assert(lhs.cols == rhs.cols);
    Mat r(lhs.rows, rhs.rows);
    for (int i = 0; i < lhs.rows; ++i)
        for (int j = 0; j < rhs.rows; ++j) {
            double s = 0.0;
            for (int k = 0; k < lhs.cols; ++k) s += lhs(i, k) * rhs(j, k);
            r(i, j) = s;
        }
    return r;
}

Mat transpose(const Mat& m) {
    Mat r(m.cols, m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) r(j, i) = m(i, j);
    return r;
}

Mat vstack(const Mat& top, const Mat& bottom) {
    if (top.empty()) return bottom;
    if (bottom.empty()) return top;
    assert(top.cols == bottom.cols);
    Mat r(top.rows + bottom.rows, top.cols);
    std::copy(top.a.begin(), top.a.end(), r.a.begin());
    std::copy(bottom.a.begin(), bottom.a.end(), r.a.begin() + top.a.size());
    return r;
}

namespace {
double hypot2(double a, double b) { return std::sqrt(a * a + b * b); }
}  // namespace

// Classic tred2/tql2 pair (Householder reduction + implicit QL with shifts).
void sym_eig(const Mat& a, Vec& evals, Mat& evecs) {
    const int n = a.rows;
    assert(a.rows == a.cols);
    evecs = a;
    evals.assign(n, 0.0);
    Vec e(n, 0.0);
    Mat& v = evecs;
    Vec& d = evals;

    for (int j = 0; j < n; ++j) d[j] = v(n - 1, j);

    // Householder tridiagonalization.
    for (int i = n - 1; i > 0; --i) {
        double scale = 0.0, h = 0.0;
        for (int k = 0; k < i; ++k) scale += std::fabs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (int j = 0; j < i; ++j) {
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
                v(j, i) = 0.0;
            }
        } else {
            for (int k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (int j = 0; j < i; ++j) e[j] = 0.0;

            for (int j = 0; j < i; ++j) {
                f = d[j];
                v(j, i) = f;
                g = e[j] + v(j, j) * f;
                for (int k = j + 1; k <= i - 1; ++k) {
                    g += v(k, j) * d[k];
                    e[k] += v(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (int j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            double hh = f / (h + h);
            for (int j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (int j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (int k = j; k <= i - 1; ++k) v(k, j) -= (f * e[k] + g * d[k]);
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for (int i = 0; i < n - 1; ++i) {
        v(n - 1, i) = v(i, i);
        v(i, i) = 1.0;
        double h = d[i + 1];
        if (h != 0.0) {
            for (int k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
            for (int j = 0; j <= i; ++j) {
                double g = 0.0;
                for (int k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
                for (int k = 0; k <= i; ++k) v(k, j) -= g * d[k];
            }
        }
        for (int k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
    }
    for (int j = 0; j < n; ++j) {
        d[j] = v(n - 1, j);
        v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
    e[0] = 0.0;

    // Implicit QL with Wilkinson shifts.
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    double f = 0.0, tst1 = 0.0;
    const double eps = std::pow(2.0, -52.0);
    for (int l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::fabs(d[l]) + std::fabs(e[l]));
        int m = l;
        while (m < n) {
            if (std::fabs(e[m]) <= eps * tst1) break;
            ++m;
        }
        if (m > l) {
            int iter = 0;
            do {
                ++iter;
                if (iter > 60) throw std::runtime_error("sym_eig: QL failed to converge");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = hypot2(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                double dl1 = d[l + 1];
                double h = g - d[l];
                for (int i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0, c2 = c, c3 = c;
                double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = hypot2(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for (int k = 0; k < n; ++k) {
                        h = v(k, i + 1);
                        v(k, i + 1) = s * v(k, i) + c * h;
                        v(k, i) = c * v(k, i) - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::fabs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // Sort ascending.
    for (int i = 0; i < n - 1; ++i) {
        int k = i;
        double p = d[i];
        for (int j = i + 1; j < n; ++j)
            if (d[j] < p) {
                k = j;
                p = d[j];
            }
        if (k != i) {
            std::swap(d[k], d[i]);
            for (int j = 0; j < n; ++j) std::swap(v(j, i), v(j, k));
        }
    }
}

bool cholesky(Mat& a, double eps) {
    const int n = a.rows;
    for (int j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (int k = 0; k < j; ++k) diag -= a(j, k) * a(j, k);
        if (diag <= eps) return false;
        diag = std::sqrt(diag);
        a(j, j) = diag;
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / diag;
        }
        for (int k = j + 1; k < n; ++k) a(j, k) = 0.0;
    }
    return true;
}

void chol_solve(const Mat& l, Vec& b) {
    const int n = l.rows;
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= l(i, k) * b[k];
        b[i] = s / l(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int k = i + 1; k < n; ++k) s -= l(k, i) * b[k];
        b[i] = s / l(i, i);
    }
}

QrFactor qr_factor(const Mat& a) {
    QrFactor f;
    f.qr = a;
    f.m = a.rows;
    f.n = a.cols;
    f.beta.assign(std::min(a.rows, a.cols), 0.0);
    f.jpvt.resize(a.cols);
    for (int j = 0; j < a.cols; ++j) f.jpvt[j] = j;

    Mat& qr = f.qr;
    Vec colnorm(a.cols, 0.0);
    for (int j = 0; j < a.cols; ++j) {
        double s = 0.0;
        for (int i = 0; i < a.rows; ++i) s += qr(i, j) * qr(i, j);
        colnorm[j] = s;
    }

    const int kmax = std::min(a.rows, a.cols);
    for (int k = 0; k < kmax; ++k) {
        // pivot on the column with the largest remaining norm
        int p = k;
        for (int j = k + 1; j < a.cols; ++j)
            if (colnorm[j] > colnorm[p]) p = j;
        if (p != k) {
            for (int i = 0; i < a.rows; ++i) std::swap(qr(i, k), qr(i, p));
            std::swap(colnorm[k], colnorm[p]);
            std::swap(f.jpvt[k], f.jpvt[p]);
        }

        double nrm = 0.0;
        for (int i = k; i < a.rows; ++i) nrm = hypot2(nrm, qr(i, k));
        if (nrm == 0.0) {
            f.beta[k] = 0.0;
            continue;
        }
        if (qr(k, k) < 0) nrm = -nrm;
        for (int i = k; i < a.rows; ++i) qr(i, k) /= nrm;
        qr(k, k) += 1.0;
        f.beta[k] = qr(k, k);

        for (int j = k + 1; j < a.cols; ++j) {
            double s = 0.0;
            for (int i = k; i < a.rows; ++i) s += qr(i, k) * qr(i, j);
            s = -s / qr(k, k);
            for (int i = k; i < a.rows; ++i) qr(i, j) += s * qr(i, k);
            double t = qr(k, j);
            colnorm[j] = std::max(colnorm[j] - t * t, 0.0);
        }
        qr(k, k) = -nrm;  // R diagonal stored with reflector sign folded in
    }
    return f;
}

int QrFactor::rank(double tol) const {
    int r = 0;
    const int kmax = std::min(m, n);
    for (int k = 0; k < kmax; ++k)
        if (std::fabs(qr(k, k)) > tol) ++r;
    return r;
}

double QrFactor::max_rdiag() const {
    double s = 0.0;
    const int kmax = std::min(m, n);
    for (int k = 0; k < kmax; ++k) s = std::max(s, std::fabs(qr(k, k)));
    return s;
}

void QrFactor::apply_qt(Vec& x) const {
    const int kmax = std::min(m, n);
    for (int k = 0; k < kmax; ++k) {
        if (beta[k] == 0.0) continue;
        // reflector H = I - v v^T / v_k with v = qr(k..m-1, k), v_k = beta[k]
        double t = beta[k] * x[k];
        for (int i = k + 1; i < m; ++i) t += qr(i, k) * x[i];
        t = -t / beta[k];
        x[k] += t * beta[k];
        for (int i = k + 1; i < m; ++i) x[i] += t * qr(i, k);
    }
}

void QrFactor::apply_q(Vec& x) const {
    const int kmax = std::min(m, n);
    for (int k = kmax - 1; k >= 0; --k) {
        if (beta[k] == 0.0) continue;
        double t = beta[k] * x[k];
        for (int i = k + 1; i < m; ++i) t += qr(i, k) * x[i];
        t = -t / beta[k];
        x[k] += t * beta[k];
        for (int i = k + 1; i < m; ++i) x[i] += t * qr(i, k);
    }
}

Vec QrFactor::q_column(int k) const {
    Vec e(m, 0.0);
    e[k] = 1.0;
    apply_q(e);
    return e;
}

Vec QrFactor::solve(const Vec& b, double tol) const {
    Vec y = b;
    apply_qt(y);
    const int r = rank(tol);
    Vec z(n, 0.0);
    for (int i = r - 1; i >= 0; --i) {
        double s = y[i];
        for (int j = i + 1; j < r; ++j) s -= qr(i, j) * z[j];
        z[i] = s / qr(i, i);
    }
    Vec out(n, 0.0);
    for (int j = 0; j < n; ++j) out[jpvt[j]] = z[j];
    return out;
}

}  // namespace mpclo
