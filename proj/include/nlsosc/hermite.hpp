#pragma once

#include <vector>

namespace nlsosc {

// Piecewise quintic Hermite interpolant through values, first and second derivatives.
class QuinticHermite {
public:
    QuinticHermite() = default;
    QuinticHermite(std::vector<double> x, std::vector<double> f, std::vector<double> df, std::vector<double> d2f);

    double operator()(double x) const { return eval(x, 0); }
    double derivative(double x, int order = 1) const { return eval(x, order); }
    double integral(double a, double b) const;

    double lo() const { return x_.front(); }
    double hi() const { return x_.back(); }
    bool contains(double x) const { return x >= lo() && x <= hi(); }

private:
    struct Piece {
        double x0;
        double c[6];
    };
    int locate(double x) const;
    double eval(double x, int order) const;
    double antiderivative(int k, double s) const;

    std::vector<double> x_;
    std::vector<Piece> pieces_;
};

}  // namespace nlsosc
