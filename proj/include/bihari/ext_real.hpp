#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace bihari {

/// Extended real value. NEG_INF marks G(0) = -inf (Osgood condition at 0),
/// POS_INF marks an argument beyond the range of G (explosion).
class ExtReal {
 public:
  enum class Kind { Finite, NegInf, PosInf };

  constexpr ExtReal() : kind_(Kind::Finite), value_(0.0) {}
  constexpr ExtReal(double v) : kind_(Kind::Finite), value_(v) {}

  static constexpr ExtReal neg_inf() { return ExtReal(Kind::NegInf); }
  static constexpr ExtReal pos_inf() { return ExtReal(Kind::PosInf); }

  constexpr bool is_finite() const { return kind_ == Kind::Finite; }
  constexpr bool is_neg_inf() const { return kind_ == Kind::NegInf; }
  constexpr bool is_pos_inf() const { return kind_ == Kind::PosInf; }

  /// Finite value; meaningless for sentinels.
  constexpr double value() const { return value_; }

  /// Value with sentinels mapped to IEEE infinities.
  constexpr double as_double() const {
    if (kind_ == Kind::NegInf) return -std::numeric_limits<double>::infinity();
    if (kind_ == Kind::PosInf) return std::numeric_limits<double>::infinity();
    return value_;
  }

  friend constexpr ExtReal operator+(ExtReal a, ExtReal b) {
    if (a.is_pos_inf() || b.is_pos_inf()) return pos_inf();
    if (a.is_neg_inf() || b.is_neg_inf()) return neg_inf();
    return ExtReal(a.value_ + b.value_);
  }
  friend constexpr ExtReal operator*(double s, ExtReal a) {
    if (a.is_finite()) return ExtReal(s * a.value_);
    // s > 0 assumed for sentinel scaling (all uses scale by positive constants)
    return a;
  }

  friend constexpr bool operator<(ExtReal a, ExtReal b) {
    return a.as_double() < b.as_double();
  }
  friend constexpr bool operator<=(ExtReal a, ExtReal b) {
    return a.as_double() <= b.as_double();
  }
  friend constexpr bool operator>(ExtReal a, ExtReal b) { return b < a; }
  friend constexpr bool operator>=(ExtReal a, ExtReal b) { return b <= a; }
  friend constexpr bool operator==(ExtReal a, ExtReal b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::Finite || a.value_ == b.value_);
  }

  std::string to_string() const {
    if (is_neg_inf()) return "-infinity";
    if (is_pos_inf()) return "infinity";
    return std::to_string(value_);
  }

  friend std::ostream& operator<<(std::ostream& os, ExtReal x) {
    return os << x.to_string();
  }

 private:
  constexpr explicit ExtReal(Kind k) : kind_(k), value_(0.0) {}
  Kind kind_;
  double value_;
};

}  // namespace bihari
