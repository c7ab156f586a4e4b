#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfnl
{

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Parameter outside its admissible range (gamma, sigma, alpha*beta, ...).
class DomainError : public Error
{
public:
    using Error::Error;
};

/// A sampled diffusivity value fell outside [c1, c2].
class BoundsViolation : public Error
{
public:
    BoundsViolation(int index, double value, double c1, double c2);
    int index() const noexcept { return index_; }

private:
    int index_;
};

class DimensionError : public Error
{
public:
    using Error::Error;
};

class SingularSystemError : public Error
{
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

/// Uniform mesh x_i = i*h on [0,1] and t_n = n*tau on [0,T].
class Grid
{
public:
    Grid(int N, int Nt, double T);

    /// Time step from the coupling h^2 = tau^(2-gamma): Nt = ceil(T / h^(2/(2-gamma))).
    static Grid paper_coupled(int N, double gamma, double T);

    int N() const noexcept { return N_; }
    int Nt() const noexcept { return Nt_; }
    double h() const noexcept { return h_; }
    double tau() const noexcept { return tau_; }
    double T() const noexcept { return T_; }

    double x(int i) const noexcept { return i * h_; }
    double t(int n) const noexcept { return n * tau_; }

private:
    int N_;
    int Nt_;
    double T_;
    double h_;
    double tau_;
};

// ---------------------------------------------------------------------------
// Problem
// ---------------------------------------------------------------------------

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

/// Raw problem data. Pass to Problem, which validates it.
struct ProblemData
{
    double gamma = 0.5;
    double alpha = 1.0;
    double beta = 1.0;
    Fn1 k;      ///< diffusivity k(x)
    Fn2 f;      ///< source f(x, t)
    Fn1 mu;     ///< flux datum mu(t)
    Fn1 u0;     ///< initial condition u0(x)
    double c1 = 1.0;
    double c2 = 1.0;
    Fn2 exact;  ///< optional reference solution u(x, t)
};

/// The nonlocal boundary value problem
///
///   D^gamma u = (k u_x)_x + f,          0 < x < 1
///   u(0,t) = alpha u(1,t),  k(1) u_x(1,t) = beta k(0) u_x(0,t) + mu(t)
///   u(x,0) = u0(x)
///
/// with 0 < gamma < 1, alpha*beta > 0 and 0 < c1 <= k <= c2.
class Problem
{
public:
    explicit Problem(ProblemData data);

    double gamma() const noexcept { return d_.gamma; }
    double alpha() const noexcept { return d_.alpha; }
    double beta() const noexcept { return d_.beta; }
    double c1() const noexcept { return d_.c1; }
    double c2() const noexcept { return d_.c2; }

    double k(double x) const { return d_.k(x); }
    double f(double x, double t) const { return d_.f(x, t); }
    double mu(double t) const { return d_.mu(t); }
    double u0(double x) const { return d_.u0(x); }

    bool has_exact() const noexcept { return static_cast<bool>(d_.exact); }
    double exact(double x, double t) const { return d_.exact(x, t); }

    const ProblemData& data() const noexcept { return d_; }

private:
    ProblemData d_;
};

/// Weight sigma of the scheme, 0 <= sigma <= 1.
class SchemeParams
{
public:
    explicit SchemeParams(double sigma);
    double sigma() const noexcept { return sigma_; }

private:
    double sigma_;
};

/// Values y_0 .. y_N on one time level.
using TimeLevel = std::vector<double>;
/// Levels 0 .. n; every past level feeds the fractional derivative.
using History = std::vector<TimeLevel>;

/// a_i = k(x_i - h/2) for i = 1..N, stored at index i-1.
/// Throws BoundsViolation (carrying i) if any a_i is outside [c1, c2].
std::vector<double> face_coefficients(const Problem& problem, const Grid& grid);

/// sigma*next + (1 - sigma)*curr, elementwise.
TimeLevel weighted_level(std::span<const double> next, std::span<const double> curr, double sigma);

/// Level 0, sampled from u0 at the grid nodes.
TimeLevel sample_initial(const Problem& problem, const Grid& grid);

} // namespace tfnl
