#pragma once

#include <cctype>
#include <string>
#include <string_view>

namespace jointslab {

namespace detail {

template <ExactField F>
class PolynomialParser {
 public:
  using Poly = Polynomial<F>;

  PolynomialParser(std::string_view text, const F& field, std::size_t nvars)
      : text_(text), field_(field), nvars_(nvars) {}

  Poly parse() {
    Poly p = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError,
                "polynomial parse error at offset " + std::to_string(pos_) + ": " + what + " in '" + std::string(text_) + "'");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  Poly expression() {
    Poly acc(field_, nvars_);
    bool negate = false;
    if (accept('-')) negate = true;
    else accept('+');
    Poly t = term();
    acc += negate ? -t : t;
    for (;;) {
      if (accept('+')) acc += term();
      else if (accept('-')) acc -= term();
      else return acc;
    }
  }

  bool starts_factor() {
    skip_space();
    if (pos_ >= text_.size()) return false;
    char c = text_[pos_];
    return std::isdigit(static_cast<unsigned char>(c)) || std::isalpha(static_cast<unsigned char>(c)) || c == '(';
  }

  Poly term() {
    Poly acc = power();
    for (;;) {
      if (accept('*')) {
        acc = acc * power();
      } else if (accept('/')) {
        skip_space();
        auto d = number_literal();
        if (field_.is_zero(d)) fail("division by zero");
        acc = acc.scaled(field_.inv(d));
      } else if (starts_factor()) {
        acc = acc * power();
      } else {
        return acc;
      }
    }
  }

  Poly power() {
    Poly base = factor();
    if (accept('^')) {
      skip_space();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected exponent");
      unsigned long e = std::stoul(std::string(text_.substr(start, pos_ - start)));
      if (e > 65535) fail("exponent too large");
      return base.pow(static_cast<unsigned>(e));
    }
    return base;
  }

  typename F::Element number_literal() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected number");
    return field_.parse(text_.substr(start, pos_ - start));
  }

  Poly factor() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (accept('(')) {
      Poly inner = expression();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (accept('-')) return -power();
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return Poly::constant(field_, nvars_, number_literal());
    if (std::isalpha(static_cast<unsigned char>(c))) return Poly::variable(field_, nvars_, variable_index());
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::size_t variable_index() {
    char c = text_[pos_++];
    if (c == 'x' && pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      unsigned long i = std::stoul(std::string(text_.substr(start, pos_ - start)));
      if (i == 0 || i > nvars_) fail("variable x" + std::to_string(i) + " out of range");
      return i - 1;
    }
    static constexpr std::string_view kAliases = "xyzw";
    auto a = kAliases.find(c);
    if (a == std::string_view::npos || nvars_ > kAliases.size() || a >= nvars_)
      fail("unknown variable '" + std::string(1, c) + "'");
    return a;
  }

  std::string_view text_;
  const F& field_;
  std::size_t nvars_;
  std::size_t pos_ = 0;
};

}  // namespace detail

template <ExactField F>
Polynomial<F> parse_polynomial(std::string_view text, const F& field, std::size_t nvars) {
  return detail::PolynomialParser<F>(text, field, nvars).parse();
}

}  // namespace jointslab
