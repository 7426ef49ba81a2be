#include "cmh/zpoly.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>
#include <sstream>

#include "cmh/errors.hpp"

namespace cmh {

// ---------------------------------------------------------------- ZPoly

ZPoly::ZPoly(std::vector<mpz_class> coeffs) : coeffs_(std::move(coeffs)) { normalize(); }

ZPoly ZPoly::x_power(unsigned n) {
  std::vector<mpz_class> c(n + 1, 0);
  c[n] = 1;
  return ZPoly(std::move(c));
}

ZPoly ZPoly::constant(const mpz_class& c) { return ZPoly(std::vector<mpz_class>{c}); }

void ZPoly::normalize() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

mpz_class ZPoly::coeff(int i) const {
  if (i < 0 || i >= static_cast<int>(coeffs_.size())) return 0;
  return coeffs_[static_cast<size_t>(i)];
}

ZPoly ZPoly::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<mpz_class> d(coeffs_.size() - 1);
  for (size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * static_cast<unsigned long>(i);
  return ZPoly(std::move(d));
}

mpz_class ZPoly::content() const {
  mpz_class g = 0;
  for (const auto& c : coeffs_) g = gcd(g, c);
  return g;
}

ZPoly operator+(const ZPoly& a, const ZPoly& b) {
  std::vector<mpz_class> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0);
  for (size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
  for (size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
  return ZPoly(std::move(c));
}

ZPoly operator-(const ZPoly& a, const ZPoly& b) {
  std::vector<mpz_class> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0);
  for (size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
  for (size_t i = 0; i < b.coeffs_.size(); ++i) c[i] -= b.coeffs_[i];
  return ZPoly(std::move(c));
}

ZPoly operator*(const ZPoly& a, const ZPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<mpz_class> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0);
  for (size_t i = 0; i < a.coeffs_.size(); ++i)
    for (size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return ZPoly(std::move(c));
}

std::optional<ZPoly> ZPoly::exact_div(const ZPoly& b) const {
  if (b.is_zero()) throw DomainError("division by the zero polynomial");
  if (is_zero()) return ZPoly{};
  if (degree() < b.degree()) return std::nullopt;
  std::vector<mpz_class> rem = coeffs_;
  std::vector<mpz_class> q(static_cast<size_t>(degree() - b.degree() + 1), 0);
  const mpz_class& lb = b.leading();
  for (int i = degree() - b.degree(); i >= 0; --i) {
    mpz_class& top = rem[static_cast<size_t>(i + b.degree())];
    if (top == 0) continue;
    if (top % lb != 0) return std::nullopt;
    mpz_class c = top / lb;
    q[static_cast<size_t>(i)] = c;
    for (int j = 0; j <= b.degree(); ++j)
      rem[static_cast<size_t>(i + j)] -= c * b.coeffs_[static_cast<size_t>(j)];
  }
  for (const auto& r : rem)
    if (r != 0) return std::nullopt;
  return ZPoly(std::move(q));
}

mpz_class ZPoly::eval(const mpz_class& x) const {
  mpz_class acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

CBall ZPoly::eval(const CBall& z) const {
  CBall acc(z.prec());
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * z;
    acc.re() += Ball::from_mpz(*it, z.prec());
  }
  return acc;
}

std::string ZPoly::to_string() const {
  if (coeffs_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    const mpz_class& c = coeffs_[static_cast<size_t>(i)];
    if (c == 0) continue;
    mpz_class a = abs(c);
    if (c < 0)
      os << "-";
    else if (!first)
      os << "+";
    first = false;
    if (i == 0) {
      os << a;
      continue;
    }
    if (a != 1) os << a << "*";
    os << "x";
    if (i > 1) os << "^" << i;
  }
  return os.str();
}

// ---------------------------------------------------------------- resultants

mpz_class bareiss_determinant(std::vector<std::vector<mpz_class>> m) {
  const size_t n = m.size();
  if (n == 0) return 1;
  int sign = 1;
  mpz_class prev = 1;
  for (size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      size_t swap_row = k + 1;
      while (swap_row < n && m[swap_row][k] == 0) ++swap_row;
      if (swap_row == n) return 0;
      std::swap(m[k], m[swap_row]);
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i) {
      for (size_t j = k + 1; j < n; ++j) {
        m[i][j] = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

mpz_class resultant(const ZPoly& a, const ZPoly& b) {
  if (a.is_zero() || b.is_zero()) return 0;
  const int m = a.degree(), n = b.degree();
  if (n == 0) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), b.leading().get_mpz_t(), static_cast<unsigned long>(m));
    return r;
  }
  if (m == 0) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), a.leading().get_mpz_t(), static_cast<unsigned long>(n));
    return r;
  }
  const size_t size = static_cast<size_t>(m + n);
  std::vector<std::vector<mpz_class>> s(size, std::vector<mpz_class>(size, 0));
  for (int r = 0; r < n; ++r)
    for (int i = 0; i <= m; ++i) s[static_cast<size_t>(r)][static_cast<size_t>(r + i)] = a.coeff(m - i);
  for (int r = 0; r < m; ++r)
    for (int i = 0; i <= n; ++i) s[static_cast<size_t>(n + r)][static_cast<size_t>(r + i)] = b.coeff(n - i);
  return bareiss_determinant(std::move(s));
}

mpz_class discriminant(const ZPoly& p) {
  if (p.degree() < 1) throw DomainError("discriminant of a constant polynomial");
  const long n = p.degree();
  mpz_class r = resultant(p, p.derivative());
  mpz_divexact(r.get_mpz_t(), r.get_mpz_t(), p.leading().get_mpz_t());
  if (((n * (n - 1)) / 2) % 2 != 0) r = -r;
  return r;
}

ZPoly cyclotomic_polynomial(unsigned f) {
  static std::mutex mu;
  static std::map<unsigned, ZPoly> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(f); it != cache.end()) return it->second;
  }
  if (f == 0) throw DomainError("cyclotomic polynomial of index 0");
  ZPoly acc = ZPoly::x_power(f) - ZPoly::constant(1);
  for (unsigned d = 1; d < f; ++d) {
    if (f % d != 0) continue;
    auto q = acc.exact_div(cyclotomic_polynomial(d));
    acc = *q;
  }
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(f, acc);
  return acc;
}

ZPoly parse_zpoly(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw ParseError("empty polynomial");
  std::map<unsigned, mpz_class> terms;
  size_t i = 0;
  auto read_digits = [&](size_t& pos) {
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    return s.substr(start, pos - start);
  };
  while (i < s.size()) {
    int sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      sign = s[i] == '-' ? -1 : 1;
      ++i;
    } else if (i != 0) {
      throw ParseError("expected '+' or '-' at position " + std::to_string(i));
    }
    std::string digits = read_digits(i);
    mpz_class c = digits.empty() ? mpz_class(1) : mpz_class(digits);
    unsigned exponent = 0;
    bool has_x = false;
    if (i < s.size() && s[i] == '*') {
      if (digits.empty()) throw ParseError("'*' without a coefficient");
      ++i;
      if (i >= s.size() || s[i] != 'x') throw ParseError("expected 'x' after '*'");
    }
    if (i < s.size() && s[i] == 'x') {
      has_x = true;
      exponent = 1;
      ++i;
      if (i < s.size() && s[i] == '^') {
        ++i;
        std::string e = read_digits(i);
        if (e.empty()) throw ParseError("missing exponent after '^'");
        if (e.size() > 4) throw ParseError("exponent too large");
        exponent = static_cast<unsigned>(std::stoul(e));
      }
    }
    if (digits.empty() && !has_x) throw ParseError("empty term at position " + std::to_string(i));
    terms[exponent] += sign * c;
  }
  unsigned top = terms.rbegin()->first;
  std::vector<mpz_class> coeffs(top + 1, 0);
  for (const auto& [e, c] : terms) coeffs[e] = c;
  return ZPoly(std::move(coeffs));
}

// ---------------------------------------------------------------- mod p

namespace {

using u64 = unsigned long long;
using ModPoly = std::vector<u64>;  // low to high, trimmed

u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % p); }

u64 powmod(u64 a, u64 e, u64 p) {
  u64 r = 1;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

void trim(ModPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

ModPoly mp_mod(ModPoly a, const ModPoly& m, u64 p) {
  const u64 inv = powmod(m.back(), p - 2, p);
  while (a.size() >= m.size()) {
    u64 c = mulmod(a.back(), inv, p);
    size_t shift = a.size() - m.size();
    for (size_t j = 0; j < m.size(); ++j) a[shift + j] = (a[shift + j] + p - mulmod(c, m[j], p)) % p;
    trim(a);
  }
  return a;
}

ModPoly mp_mulmod(const ModPoly& a, const ModPoly& b, const ModPoly& m, u64 p) {
  if (a.empty() || b.empty()) return {};
  ModPoly c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + mulmod(a[i], b[j], p)) % p;
  trim(c);
  return mp_mod(std::move(c), m, p);
}

ModPoly mp_gcd(ModPoly a, ModPoly b, u64 p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    ModPoly r = mp_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    u64 inv = powmod(a.back(), p - 2, p);
    for (auto& c : a) c = mulmod(c, inv, p);
  }
  return a;
}

ModPoly mp_div(ModPoly a, const ModPoly& b, u64 p) {
  const u64 inv = powmod(b.back(), p - 2, p);
  ModPoly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, 0);
  while (a.size() >= b.size() && !a.empty()) {
    u64 c = mulmod(a.back(), inv, p);
    size_t shift = a.size() - b.size();
    q[shift] = c;
    for (size_t j = 0; j < b.size(); ++j) a[shift + j] = (a[shift + j] + p - mulmod(c, b[j], p)) % p;
    trim(a);
  }
  return q;
}

ModPoly mp_compose_pow(const ModPoly& h, u64 p, const ModPoly& m) {
  // h^p mod m
  ModPoly result{1};
  ModPoly base = h;
  u64 e = p;
  while (e) {
    if (e & 1) result = mp_mulmod(result, base, m, p);
    base = mp_mulmod(base, base, m, p);
    e >>= 1;
  }
  return result;
}

}  // namespace

std::optional<std::vector<int>> factor_degrees_mod(const ZPoly& poly, unsigned long prime) {
  const u64 p = prime;
  ModPoly f;
  for (const auto& c : poly.coeffs()) {
    mpz_class r = c % mpz_class(static_cast<unsigned long>(p));
    if (r < 0) r += static_cast<unsigned long>(p);
    f.push_back(r.get_ui());
  }
  trim(f);
  if (static_cast<int>(f.size()) - 1 != poly.degree()) return std::nullopt;
  const u64 inv = powmod(f.back(), p - 2, p);
  for (auto& c : f) c = mulmod(c, inv, p);
  ModPoly df;
  for (size_t i = 1; i < f.size(); ++i) df.push_back(mulmod(f[i], i % p, p));
  trim(df);
  if (df.empty() || mp_gcd(f, df, p).size() != 1) return std::nullopt;

  std::vector<int> degrees;
  ModPoly h = mp_mod(ModPoly{0, 1}, f, p);
  for (int d = 1; static_cast<int>(f.size()) - 1 >= 2 * d; ++d) {
    h = mp_compose_pow(h, p, f);
    ModPoly hx = h;
    if (hx.size() < 2) hx.resize(2, 0);
    hx[1] = (hx[1] + p - 1) % p;
    trim(hx);
    ModPoly g = mp_gcd(f, hx, p);
    int gd = static_cast<int>(g.size()) - 1;
    if (gd > 0) {
      for (int k = 0; k < gd / d; ++k) degrees.push_back(d);
      f = mp_div(f, g, p);
      h = mp_mod(h, f, p);
    }
  }
  if (f.size() > 1) degrees.push_back(static_cast<int>(f.size()) - 1);
  std::sort(degrees.begin(), degrees.end());
  return degrees;
}

std::vector<unsigned long> small_primes(unsigned long count) {
  std::vector<unsigned long> primes;
  for (unsigned long n = 2; primes.size() < count; ++n) {
    bool prime = true;
    for (unsigned long q : primes) {
      if (q * q > n) break;
      if (n % q == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(n);
  }
  return primes;
}

std::vector<std::pair<mpz_class, int>> factor_integer(const mpz_class& n_in) {
  mpz_class n = abs(n_in);
  std::vector<std::pair<mpz_class, int>> out;
  if (n <= 1) return out;
  for (unsigned long d = 2; d < 2000000; d += (d == 2 ? 1 : 2)) {
    mpz_class dd = d;
    if (dd * dd > n) break;
    int e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    if (e) out.emplace_back(dd, e);
  }
  if (n > 1) {
    if (mpz_probab_prime_p(n.get_mpz_t(), 30) == 0)
      throw DomainError("integer factorization beyond trial-division range");
    out.emplace_back(n, 1);
  }
  return out;
}

bool is_perfect_square(const mpq_class& q) {
  if (q < 0) return false;
  return mpz_perfect_square_p(q.get_num_mpz_t()) && mpz_perfect_square_p(q.get_den_mpz_t());
}

// ---------------------------------------------------------------- QPoly

QPoly::QPoly(std::vector<mpq_class> coeffs) : coeffs_(std::move(coeffs)) { normalize(); }

QPoly::QPoly(const ZPoly& p) {
  for (const auto& c : p.coeffs()) coeffs_.emplace_back(c);
  normalize();
}

void QPoly::normalize() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

QPoly operator+(const QPoly& a, const QPoly& b) {
  std::vector<mpq_class> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0);
  for (size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
  for (size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
  return QPoly(std::move(c));
}

QPoly operator*(const QPoly& a, const QPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<mpq_class> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0);
  for (size_t i = 0; i < a.coeffs_.size(); ++i)
    for (size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return QPoly(std::move(c));
}

QPoly QPoly::mod(const ZPoly& m) const {
  if (!m.is_monic()) throw DomainError("QPoly::mod requires a monic modulus");
  std::vector<mpq_class> r = coeffs_;
  const int dm = m.degree();
  for (int i = static_cast<int>(r.size()) - 1; i >= dm; --i) {
    mpq_class c = r[static_cast<size_t>(i)];
    if (c == 0) continue;
    for (int j = 0; j <= dm; ++j) r[static_cast<size_t>(i - dm + j)] -= c * mpq_class(m.coeff(j));
  }
  if (static_cast<int>(r.size()) > dm) r.resize(static_cast<size_t>(dm));
  return QPoly(std::move(r));
}

CBall QPoly::eval(const CBall& z) const {
  CBall acc(z.prec());
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * z;
    acc.re() += Ball::from_mpq(*it, z.prec());
  }
  return acc;
}

QPoly compose_mod(const ZPoly& p, const QPoly& h, const ZPoly& m) {
  QPoly acc;
  for (int i = p.degree(); i >= 0; --i) {
    acc = (acc * h).mod(m);
    acc = acc + QPoly(std::vector<mpq_class>{mpq_class(p.coeff(i))});
  }
  return acc.mod(m);
}

}  // namespace cmh
