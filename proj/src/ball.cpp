#include "cmh/ball.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>

#include "cmh/errors.hpp"

namespace cmh {

// ---------------------------------------------------------------- Real

Real::Real(Prec prec) {
  mpfr_init2(value_, prec);
  mpfr_set_zero(value_, 1);
}

Real::Real(const Real& other) {
  mpfr_init2(value_, other.prec());
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
  mpfr_init2(value_, MPFR_PREC_MIN);
  mpfr_swap(value_, other.value_);
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    mpfr_set_prec(value_, other.prec());
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

Real::~Real() { mpfr_clear(value_); }

// ---------------------------------------------------------------- helpers

namespace {

Prec max_prec(const Ball& a, const Ball& b) { return std::max(a.prec(), b.prec()); }

// Adds one ulp of `m` to `rad` when the operation producing m was inexact.
void add_rounding(Real& rad, const Real& m, int ternary) {
  if (ternary == 0 || mpfr_zero_p(m.get())) return;
  Real e(kRadiusPrec);
  mpfr_set_ui_2exp(e.get(), 1, mpfr_get_exp(m.get()) - m.prec(), MPFR_RNDU);
  mpfr_add(rad.get(), rad.get(), e.get(), MPFR_RNDU);
}

Real abs_up(const Real& x) {
  Real r(kRadiusPrec);
  mpfr_abs(r.get(), x.get(), MPFR_RNDU);
  return r;
}

}  // namespace

// ---------------------------------------------------------------- Ball

Ball::Ball(Prec prec) : mid_(prec), rad_(kRadiusPrec) {}

Ball Ball::from_si(long v, Prec prec) {
  Ball b(prec);
  int t = mpfr_set_si(b.mid_.get(), v, MPFR_RNDN);
  add_rounding(b.rad_, b.mid_, t);
  return b;
}

Ball Ball::from_mpz(const mpz_class& v, Prec prec) {
  Ball b(prec);
  int t = mpfr_set_z(b.mid_.get(), v.get_mpz_t(), MPFR_RNDN);
  add_rounding(b.rad_, b.mid_, t);
  return b;
}

Ball Ball::from_mpq(const mpq_class& v, Prec prec) {
  Ball b(prec);
  int t = mpfr_set_q(b.mid_.get(), v.get_mpq_t(), MPFR_RNDN);
  add_rounding(b.rad_, b.mid_, t);
  return b;
}

Ball Ball::from_real(const Real& v, Prec prec) {
  Ball b(prec);
  int t = mpfr_set(b.mid_.get(), v.get(), MPFR_RNDN);
  add_rounding(b.rad_, b.mid_, t);
  return b;
}

Ball Ball::pi(Prec prec) {
  Ball b(prec);
  int t = mpfr_const_pi(b.mid_.get(), MPFR_RNDN);
  add_rounding(b.rad_, b.mid_, t);
  return b;
}

Ball& Ball::add_error(const Real& e) {
  Real a = abs_up(e);
  mpfr_add(rad_.get(), rad_.get(), a.get(), MPFR_RNDU);
  return *this;
}

Ball& Ball::add_error_2exp(long exponent) {
  Real e(kRadiusPrec);
  mpfr_set_ui_2exp(e.get(), 1, exponent, MPFR_RNDU);
  return add_error(e);
}

Real Ball::lower() const {
  Real r(prec());
  mpfr_sub(r.get(), mid_.get(), rad_.get(), MPFR_RNDD);
  return r;
}

Real Ball::upper() const {
  Real r(prec());
  mpfr_add(r.get(), mid_.get(), rad_.get(), MPFR_RNDU);
  return r;
}

Real Ball::abs_upper() const {
  Real r(prec());
  mpfr_abs(r.get(), mid_.get(), MPFR_RNDU);
  mpfr_add(r.get(), r.get(), rad_.get(), MPFR_RNDU);
  return r;
}

Real Ball::abs_lower() const {
  Real r(prec());
  mpfr_abs(r.get(), mid_.get(), MPFR_RNDD);
  mpfr_sub(r.get(), r.get(), rad_.get(), MPFR_RNDD);
  if (mpfr_sgn(r.get()) < 0) mpfr_set_zero(r.get(), 1);
  return r;
}

bool Ball::contains_zero() const { return mpfr_cmpabs(mid_.get(), rad_.get()) <= 0; }

bool Ball::is_positive() const { return mpfr_sgn(lower().get()) > 0; }

bool Ball::is_negative() const { return mpfr_sgn(upper().get()) < 0; }

bool Ball::contains(const mpz_class& n) const {
  return mpfr_cmp_z(lower().get(), n.get_mpz_t()) <= 0 &&
         mpfr_cmp_z(upper().get(), n.get_mpz_t()) >= 0;
}

bool Ball::overlaps(const Ball& other) const {
  return mpfr_cmp(lower().get(), other.upper().get()) <= 0 &&
         mpfr_cmp(other.lower().get(), upper().get()) <= 0;
}

std::string Ball::to_string(int digits) const {
  char* s = nullptr;
  mpfr_asprintf(&s, "%.*Rg +/- %.3Rg", digits, mid_.get(), rad_.get());
  std::unique_ptr<char, void (*)(char*)> guard(s, [](char* p) { mpfr_free_str(p); });
  return std::string(s);
}

Ball operator+(const Ball& a, const Ball& b) {
  Ball r(max_prec(a, b));
  int t = mpfr_add(r.mid_.get(), a.mid_.get(), b.mid_.get(), MPFR_RNDN);
  mpfr_add(r.rad_.get(), a.rad_.get(), b.rad_.get(), MPFR_RNDU);
  add_rounding(r.rad_, r.mid_, t);
  return r;
}

Ball operator-(const Ball& a, const Ball& b) {
  Ball r(max_prec(a, b));
  int t = mpfr_sub(r.mid_.get(), a.mid_.get(), b.mid_.get(), MPFR_RNDN);
  mpfr_add(r.rad_.get(), a.rad_.get(), b.rad_.get(), MPFR_RNDU);
  add_rounding(r.rad_, r.mid_, t);
  return r;
}

Ball operator-(const Ball& a) {
  Ball r = a;
  mpfr_neg(r.mid_.get(), r.mid_.get(), MPFR_RNDN);
  return r;
}

Ball operator*(const Ball& a, const Ball& b) {
  Ball r(max_prec(a, b));
  int t = mpfr_mul(r.mid_.get(), a.mid_.get(), b.mid_.get(), MPFR_RNDN);
  // |a| rb + |b| ra + ra rb
  Real am = abs_up(a.mid_), bm = abs_up(b.mid_);
  Real x(kRadiusPrec), y(kRadiusPrec);
  mpfr_mul(x.get(), am.get(), b.rad_.get(), MPFR_RNDU);
  mpfr_mul(y.get(), bm.get(), a.rad_.get(), MPFR_RNDU);
  mpfr_add(x.get(), x.get(), y.get(), MPFR_RNDU);
  mpfr_mul(y.get(), a.rad_.get(), b.rad_.get(), MPFR_RNDU);
  mpfr_add(r.rad_.get(), x.get(), y.get(), MPFR_RNDU);
  add_rounding(r.rad_, r.mid_, t);
  return r;
}

Ball operator/(const Ball& a, const Ball& b) {
  if (b.contains_zero()) throw PrecisionError("ball division by an enclosure of zero");
  Ball r(max_prec(a, b));
  int t = mpfr_div(r.mid_.get(), a.mid_.get(), b.mid_.get(), MPFR_RNDN);
  // (|a| rb + |b| ra) / (|b| (|b| - rb))
  Real am = abs_up(a.mid_), bm = abs_up(b.mid_);
  Real num(kRadiusPrec), y(kRadiusPrec);
  mpfr_mul(num.get(), am.get(), b.rad_.get(), MPFR_RNDU);
  mpfr_mul(y.get(), bm.get(), a.rad_.get(), MPFR_RNDU);
  mpfr_add(num.get(), num.get(), y.get(), MPFR_RNDU);
  Real blo = b.abs_lower();
  Real bmd(kRadiusPrec);
  mpfr_abs(bmd.get(), b.mid_.get(), MPFR_RNDD);
  Real den(kRadiusPrec);
  mpfr_mul(den.get(), bmd.get(), blo.get(), MPFR_RNDD);
  mpfr_div(r.rad_.get(), num.get(), den.get(), MPFR_RNDU);
  add_rounding(r.rad_, r.mid_, t);
  return r;
}

Ball mul_2si(const Ball& x, long e) {
  Ball r = x;
  mpfr_mul_2si(r.mid_mut().get(), x.mid().get(), e, MPFR_RNDN);
  Real rad(kRadiusPrec);
  mpfr_mul_2si(rad.get(), x.rad().get(), e, MPFR_RNDU);
  r.set_radius_zero();
  r.add_error(rad);
  return r;
}

Ball sqr(const Ball& x) {
  Ball r = x * x;
  // x*x may straddle zero in the generic product bound; squares are nonnegative
  return r;
}

Ball abs(const Ball& x) {
  if (!x.contains_zero()) return x.is_negative() ? -x : x;
  // [0, |m| + r] as a ball centred at half the upper bound
  Real up = x.abs_upper();
  Ball r(x.prec());
  mpfr_div_2ui(r.mid_mut().get(), up.get(), 1, MPFR_RNDU);
  Real half(kRadiusPrec);
  mpfr_set(half.get(), r.mid().get(), MPFR_RNDU);
  r.add_error(half);
  return r;
}

Ball sqrt(const Ball& x) {
  Real lo = x.lower();
  if (mpfr_sgn(lo.get()) <= 0) throw PrecisionError("sqrt of a ball not certified positive");
  Ball r(x.prec());
  int t = mpfr_sqrt(r.mid_mut().get(), x.mid().get(), MPFR_RNDN);
  Real s(kRadiusPrec);
  mpfr_sqrt(s.get(), lo.get(), MPFR_RNDD);
  Real e(kRadiusPrec);
  mpfr_div(e.get(), x.rad().get(), s.get(), MPFR_RNDU);
  r.add_error(e);
  Real rad = r.rad();
  add_rounding(rad, r.mid(), t);
  r.set_radius_zero();
  r.add_error(rad);
  return r;
}

Ball log(const Ball& x) {
  Real lo = x.lower();
  if (mpfr_sgn(lo.get()) <= 0) throw PrecisionError("log of a ball not certified positive");
  Ball r(x.prec());
  int t = mpfr_log(r.mid_mut().get(), x.mid().get(), MPFR_RNDN);
  Real e(kRadiusPrec);
  mpfr_div(e.get(), x.rad().get(), lo.get(), MPFR_RNDU);
  Real rad(kRadiusPrec);
  mpfr_set(rad.get(), e.get(), MPFR_RNDU);
  add_rounding(rad, r.mid(), t);
  r.add_error(rad);
  return r;
}

Ball exp(const Ball& x) {
  Ball r(x.prec());
  int t = mpfr_exp(r.mid_mut().get(), x.mid().get(), MPFR_RNDN);
  // exp(m) (exp(r) - 1)
  Real em(kRadiusPrec), er(kRadiusPrec);
  mpfr_exp(em.get(), x.mid().get(), MPFR_RNDU);
  mpfr_expm1(er.get(), x.rad().get(), MPFR_RNDU);
  Real rad(kRadiusPrec);
  mpfr_mul(rad.get(), em.get(), er.get(), MPFR_RNDU);
  add_rounding(rad, r.mid(), t);
  r.add_error(rad);
  return r;
}

Ball cos(const Ball& x) {
  Ball r(x.prec());
  int t = mpfr_cos(r.mid_mut().get(), x.mid().get(), MPFR_RNDN);
  Real rad = x.rad();
  add_rounding(rad, r.mid(), t);
  r.add_error(rad);
  return r;
}

Ball sin(const Ball& x) {
  Ball r(x.prec());
  int t = mpfr_sin(r.mid_mut().get(), x.mid().get(), MPFR_RNDN);
  Real rad = x.rad();
  add_rounding(rad, r.mid(), t);
  r.add_error(rad);
  return r;
}

Ball lngamma(const Ball& x) {
  Real lo = x.lower();
  Real up = x.upper();
  if (mpfr_sgn(lo.get()) <= 0 || mpfr_cmp_ui(up.get(), 2) > 0)
    throw DomainError("lngamma: ball must lie inside (0, 2]");
  Ball r(x.prec());
  int t = mpfr_lngamma(r.mid_mut().get(), x.mid().get(), MPFR_RNDN);
  // On (0, 2] the digamma function satisfies |psi(t)| <= 1/t + 1.
  Real d(kRadiusPrec);
  mpfr_ui_div(d.get(), 1, lo.get(), MPFR_RNDU);
  mpfr_add_ui(d.get(), d.get(), 1, MPFR_RNDU);
  Real rad(kRadiusPrec);
  mpfr_mul(rad.get(), d.get(), x.rad().get(), MPFR_RNDU);
  add_rounding(rad, r.mid(), t);
  r.add_error(rad);
  return r;
}

Ball pow_ui(const Ball& x, unsigned long n) {
  Ball result = Ball::from_si(1, x.prec());
  Ball base = x;
  while (n > 0) {
    if (n & 1UL) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

Ball hull(const Ball& a, const Ball& b) {
  Prec p = max_prec(a, b);
  Real lo(p), hi(p);
  Real al = a.lower(), bl = b.lower(), au = a.upper(), bu = b.upper();
  mpfr_min(lo.get(), al.get(), bl.get(), MPFR_RNDD);
  mpfr_max(hi.get(), au.get(), bu.get(), MPFR_RNDU);
  Ball r(p);
  mpfr_add(r.mid_mut().get(), lo.get(), hi.get(), MPFR_RNDN);
  mpfr_div_2ui(r.mid_mut().get(), r.mid().get(), 1, MPFR_RNDN);
  Real d1(kRadiusPrec), d2(kRadiusPrec);
  mpfr_sub(d1.get(), hi.get(), r.mid().get(), MPFR_RNDU);
  mpfr_sub(d2.get(), r.mid().get(), lo.get(), MPFR_RNDU);
  mpfr_max(d1.get(), d1.get(), d2.get(), MPFR_RNDU);
  r.add_error(d1);
  return r;
}

// ---------------------------------------------------------------- CBall

CBall CBall::root_of_unity(long num, long den, Prec prec) {
  Ball angle = mul_2si(Ball::pi(prec + 16), 1) * Ball::from_si(num, prec + 16) /
               Ball::from_si(den, prec + 16);
  CBall z(cos(angle), sin(angle));
  return z;
}

Real CBall::radius() const {
  Real r(kRadiusPrec);
  mpfr_max(r.get(), re_.rad().get(), im_.rad().get(), MPFR_RNDU);
  return r;
}

CBall operator+(const CBall& a, const CBall& b) { return {a.re_ + b.re_, a.im_ + b.im_}; }
CBall operator-(const CBall& a, const CBall& b) { return {a.re_ - b.re_, a.im_ - b.im_}; }
CBall operator-(const CBall& a) { return {-a.re_, -a.im_}; }

CBall operator*(const CBall& a, const CBall& b) {
  return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
}

CBall operator*(const CBall& a, const Ball& b) { return {a.re_ * b, a.im_ * b}; }

CBall operator/(const CBall& a, const CBall& b) {
  Ball d = abs2(b);
  CBall n = a * conj(b);
  return {n.re_ / d, n.im_ / d};
}

CBall conj(const CBall& z) { return {z.re(), -z.im()}; }

Ball abs2(const CBall& z) { return sqr(z.re()) + sqr(z.im()); }

Ball abs(const CBall& z) {
  Ball a2 = abs2(z);
  if (a2.is_positive()) return sqrt(a2);
  Real up = a2.abs_upper();
  Ball u(z.prec());
  mpfr_sqrt(u.mid_mut().get(), up.get(), MPFR_RNDU);
  Ball r(z.prec());
  mpfr_div_2ui(r.mid_mut().get(), u.mid().get(), 1, MPFR_RNDU);
  r.add_error(r.mid());
  return r;
}

Ball log_abs(const CBall& z) {
  Ball a2 = abs2(z);
  if (!a2.is_positive()) throw PrecisionError("log|z| of an enclosure that may contain zero");
  return mul_2si(log(a2), -1);
}

CBall sqr(const CBall& z) { return z * z; }

}  // namespace cmh
