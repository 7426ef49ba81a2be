// Midpoint-radius ("ball") arithmetic over MPFR.
//
// A Ball [m +/- r] represents every real within distance r of m. All
// operations round the midpoint to nearest and inflate the radius so that
// the true result of the operation applied to any represented inputs is
// contained in the output. Radii are kept as short MPFR numbers rounded
// upward, so they never underflow at the precisions used here.
#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>
#include <utility>

namespace cmh {

using Prec = mpfr_prec_t;

inline constexpr Prec kRadiusPrec = 64;

/// Owning wrapper around mpfr_t.
class Real {
 public:
  explicit Real(Prec prec = 64);
  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  mpfr_ptr get() { return value_; }
  mpfr_srcptr get() const { return value_; }
  Prec prec() const { return mpfr_get_prec(value_); }
  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(value_) != 0; }

 private:
  mpfr_t value_;
};

class Ball {
 public:
  explicit Ball(Prec prec = 128);

  static Ball from_si(long v, Prec prec);
  static Ball from_mpz(const mpz_class& v, Prec prec);
  static Ball from_mpq(const mpq_class& v, Prec prec);
  /// Exact value of the given midpoint (no radius).
  static Ball from_real(const Real& v, Prec prec);
  static Ball pi(Prec prec);

  const Real& mid() const { return mid_; }
  const Real& rad() const { return rad_; }
  Real& mid_mut() { return mid_; }
  Prec prec() const { return mid_.prec(); }

  /// Widens the radius by e (rounded upward).
  Ball& add_error(const Real& e);
  Ball& add_error_2exp(long exponent);
  void set_radius_zero() { mpfr_set_zero(rad_.get(), 1); }

  Real lower() const;
  Real upper() const;
  /// Upper bound for |x| over the ball.
  Real abs_upper() const;
  /// Lower bound for |x| over the ball (0 if the ball contains zero).
  Real abs_lower() const;

  bool contains_zero() const;
  bool is_positive() const;
  bool is_negative() const;
  bool contains(const mpz_class& n) const;
  bool overlaps(const Ball& other) const;

  double mid_double() const { return mid_.to_double(); }
  double rad_double() const { return rad_.to_double(); }
  std::string to_string(int digits = 20) const;

  friend Ball operator+(const Ball& a, const Ball& b);
  friend Ball operator-(const Ball& a, const Ball& b);
  friend Ball operator*(const Ball& a, const Ball& b);
  friend Ball operator/(const Ball& a, const Ball& b);
  friend Ball operator-(const Ball& a);
  Ball& operator+=(const Ball& b) { return *this = *this + b; }
  Ball& operator-=(const Ball& b) { return *this = *this - b; }
  Ball& operator*=(const Ball& b) { return *this = *this * b; }

 private:
  Real mid_;
  Real rad_;
};

Ball mul_2si(const Ball& x, long e);
Ball sqr(const Ball& x);
Ball abs(const Ball& x);
Ball sqrt(const Ball& x);
Ball log(const Ball& x);
Ball exp(const Ball& x);
Ball cos(const Ball& x);
Ball sin(const Ball& x);
/// log Gamma(x) for balls inside (0, 2].
Ball lngamma(const Ball& x);
Ball pow_ui(const Ball& x, unsigned long n);
/// Ball covering the union of a and b.
Ball hull(const Ball& a, const Ball& b);

/// Complex ball as a rectangle: independent real and imaginary balls.
class CBall {
 public:
  explicit CBall(Prec prec = 128) : re_(prec), im_(prec) {}
  CBall(Ball re, Ball im) : re_(std::move(re)), im_(std::move(im)) {}

  static CBall from_si(long v, Prec prec) { return {Ball::from_si(v, prec), Ball(prec)}; }
  /// exp(2 pi i num / den).
  static CBall root_of_unity(long num, long den, Prec prec);

  const Ball& re() const { return re_; }
  const Ball& im() const { return im_; }
  Ball& re() { return re_; }
  Ball& im() { return im_; }
  Prec prec() const { return re_.prec(); }

  /// Largest of the two component radii.
  Real radius() const;
  bool contains_zero() const { return re_.contains_zero() && im_.contains_zero(); }
  bool overlaps(const CBall& o) const { return re_.overlaps(o.re_) && im_.overlaps(o.im_); }

  friend CBall operator+(const CBall& a, const CBall& b);
  friend CBall operator-(const CBall& a, const CBall& b);
  friend CBall operator*(const CBall& a, const CBall& b);
  friend CBall operator*(const CBall& a, const Ball& b);
  friend CBall operator/(const CBall& a, const CBall& b);
  friend CBall operator-(const CBall& a);
  CBall& operator+=(const CBall& b) { return *this = *this + b; }
  CBall& operator-=(const CBall& b) { return *this = *this - b; }
  CBall& operator*=(const CBall& b) { return *this = *this * b; }

 private:
  Ball re_;
  Ball im_;
};

CBall conj(const CBall& z);
Ball abs2(const CBall& z);
Ball abs(const CBall& z);
/// log|z|; throws PrecisionError if z may be zero.
Ball log_abs(const CBall& z);
CBall sqr(const CBall& z);

}  // namespace cmh
