#include "nlsosc/hermite.hpp"

#include "nlsosc/error.hpp"

#include <algorithm>
#include <string>

namespace nlsosc {

QuinticHermite::QuinticHermite(std::vector<double> x, std::vector<double> f, std::vector<double> df,
                               std::vector<double> d2f)
    : x_(std::move(x))
{
    const std::size_t n = x_.size();
    if (n < 2 || f.size() != n || df.size() != n || d2f.size() != n)
        fail(ErrorCode::InsufficientPoints, "hermite interpolant needs matching arrays of length >= 2");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) fail(ErrorCode::NonMonotoneGrid, "hermite nodes must increase");

    pieces_.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double H = x_[i + 1] - x_[i];
        const double r0 = f[i + 1] - f[i] - df[i] * H - 0.5 * d2f[i] * H * H;
        const double r1 = df[i + 1] - df[i] - d2f[i] * H;
        const double r2 = d2f[i + 1] - d2f[i];
        Piece& p = pieces_[i];
        p.x0 = x_[i];
        p.c[0] = f[i];
        p.c[1] = df[i];
        p.c[2] = 0.5 * d2f[i];
        p.c[3] = (H * H * r2 - 8.0 * H * r1 + 20.0 * r0) / (2.0 * H * H * H);
        p.c[4] = -(H * H * r2 - 7.0 * H * r1 + 15.0 * r0) / (H * H * H * H);
        p.c[5] = (H * H * r2 - 6.0 * H * r1 + 12.0 * r0) / (2.0 * H * H * H * H * H);
    }
}

int QuinticHermite::locate(double x) const
{
    if (!contains(x)) fail(ErrorCode::OutOfRange, "abscissa " + std::to_string(x) + " outside interpolation range");
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const int k = static_cast<int>(it - x_.begin()) - 1;
    return std::clamp(k, 0, static_cast<int>(pieces_.size()) - 1);
}

double QuinticHermite::eval(double x, int order) const
{
    const Piece& p = pieces_[locate(x)];
    const double s = x - p.x0;
    double c[6];
    std::copy(std::begin(p.c), std::end(p.c), c);
    int deg = 5;
    for (int o = 0; o < order; ++o) {
        for (int j = 0; j < deg; ++j) c[j] = (j + 1) * c[j + 1];
        --deg;
    }
    double acc = 0.0;
    for (int j = deg; j >= 0; --j) acc = acc * s + c[j];
    return acc;
}

double QuinticHermite::antiderivative(int k, double s) const
{
    const Piece& p = pieces_[k];
    double acc = 0.0;
    for (int j = 5; j >= 0; --j) acc = acc * s + p.c[j] / (j + 1);
    return acc * s;
}

double QuinticHermite::integral(double a, double b) const
{
    if (a > b) return -integral(b, a);
    const int ka = locate(a);
    const int kb = locate(b);
    if (ka == kb) return antiderivative(ka, b - pieces_[ka].x0) - antiderivative(ka, a - pieces_[ka].x0);
    double total = antiderivative(ka, x_[ka + 1] - pieces_[ka].x0) - antiderivative(ka, a - pieces_[ka].x0);
    for (int k = ka + 1; k < kb; ++k) total += antiderivative(k, x_[k + 1] - x_[k]);
    total += antiderivative(kb, b - pieces_[kb].x0);
    return total;
}

}  // namespace nlsosc
