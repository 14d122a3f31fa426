#include "bfoml/syntax.hpp"

#include <cctype>
#include <map>

namespace bfoml {

namespace {

std::string join(const std::vector<std::string>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += xs[i];
  }
  return s;
}

}  // namespace

ParseError::ParseError(std::size_t l, std::size_t c, std::string msg, std::vector<std::string> exp)
    : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg +
                         (exp.empty() ? std::string() : "; expected one of: " + join(exp))),
      line(l),
      column(c),
      message(std::move(msg)),
      expected(std::move(exp)) {}

namespace {

enum class Tok {
  Ident,
  LParen,
  RParen,
  Comma,
  Dot,
  Tilde,
  Amp,
  Bar,
  Arrow,
  DArrow,
  True,
  False,
  Box,
  Dia,
  Forall,
  Exists,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t col;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End:
      return "end of input";
    case Tok::Ident:
      return "identifier '" + t.text + "'";
    default:
      return "'" + t.text + "'";
  }
}

std::vector<Token> lex(std::string_view s) {
  static const std::map<std::string, Tok, std::less<>> keywords = {
      {"true", Tok::True},     {"false", Tok::False},   {"box", Tok::Box},
      {"dia", Tok::Dia},       {"forall", Tok::Forall}, {"exists", Tok::Exists},
  };
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    std::size_t l0 = line, c0 = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' ||
                              s[j] == '\''))
        ++j;
      std::string word(s.substr(i, j - i));
      auto kw = keywords.find(word);
      out.push_back({kw == keywords.end() ? Tok::Ident : kw->second, word, l0, c0});
      advance(j - i);
      continue;
    }
    if (s.substr(i, 3) == "<->") {
      out.push_back({Tok::DArrow, "<->", l0, c0});
      advance(3);
      continue;
    }
    if (s.substr(i, 2) == "->") {
      out.push_back({Tok::Arrow, "->", l0, c0});
      advance(2);
      continue;
    }
    Tok k;
    switch (c) {
      case '(':
        k = Tok::LParen;
        break;
      case ')':
        k = Tok::RParen;
        break;
      case ',':
        k = Tok::Comma;
        break;
      case '.':
        k = Tok::Dot;
        break;
      case '~':
        k = Tok::Tilde;
        break;
      case '&':
        k = Tok::Amp;
        break;
      case '|':
        k = Tok::Bar;
        break;
      default:
        throw ParseError(l0, c0, std::string("unexpected character '") + c + "'", {});
    }
    out.push_back({k, std::string(1, c), l0, c0});
    advance(1);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

const std::vector<std::string> kFormulaStart = {"'~'",      "'box'",   "'dia'",  "'forall'",
                                                "'exists'", "'('",     "'true'", "'false'",
                                                "predicate"};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Formula document() {
    Formula f = iff();
    if (peek().kind != Tok::End)
      fail(peek(), "unexpected " + describe(peek()),
           {"'&'", "'|'", "'->'", "'<->'", "end of input"});
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  [[noreturn]] void fail(const Token& t, const std::string& msg, std::vector<std::string> exp) {
    throw ParseError(t.line, t.col, msg, std::move(exp));
  }

  const Token& expect(Tok k, const std::string& what) {
    if (peek().kind != k) fail(peek(), "unexpected " + describe(peek()), {what});
    return take();
  }

  Formula iff() {
    Formula l = implies();
    while (peek().kind == Tok::DArrow) {
      take();
      l = Formula::iff(l, implies());
    }
    return l;
  }

  Formula implies() {
    Formula l = disjunction();
    if (peek().kind == Tok::Arrow) {
      take();
      return Formula::implies(l, implies());
    }
    return l;
  }

  Formula disjunction() {
    Formula l = conjunction();
    while (peek().kind == Tok::Bar) {
      take();
      l = Formula::disj(l, conjunction());
    }
    return l;
  }

  Formula conjunction() {
    Formula l = unary();
    while (peek().kind == Tok::Amp) {
      take();
      l = Formula::conj(l, unary());
    }
    return l;
  }

  Formula unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Tilde:
        take();
        if (peek().kind == Tok::Ident) {
          Formula a = atom();
          return Formula::neg_atom(a.pred(), {a.args().begin(), a.args().end()});
        }
        return Formula::negation(unary());
      case Tok::Box:
        take();
        return Formula::box(unary());
      case Tok::Dia:
        take();
        return Formula::dia(unary());
      case Tok::Forall:
      case Tok::Exists: {
        take();
        Var x = Var::named(expect(Tok::Ident, "variable").text);
        expect(Tok::Dot, "'.'");
        Formula body = iff();
        return t.kind == Tok::Forall ? Formula::forall(x, body) : Formula::exists(x, body);
      }
      case Tok::LParen: {
        take();
        Formula f = iff();
        expect(Tok::RParen, "')'");
        return f;
      }
      case Tok::True:
        take();
        return Formula::top();
      case Tok::False:
        take();
        return Formula::bottom();
      case Tok::Ident:
        return atom();
      default:
        fail(t, "unexpected " + describe(t), kFormulaStart);
    }
  }

  Formula atom() {
    const Token& name = take();
    std::vector<Var> args;
    if (peek().kind == Tok::LParen) {
      take();
      if (peek().kind != Tok::RParen) {
        args.push_back(Var::named(expect(Tok::Ident, "variable").text));
        while (peek().kind == Tok::Comma) {
          take();
          args.push_back(Var::named(expect(Tok::Ident, "variable").text));
        }
      }
      if (peek().kind != Tok::RParen) fail(peek(), "unexpected " + describe(peek()), {"','", "')'"});
      take();
    }
    auto [it, fresh] = arity_.emplace(name.text, args.size());
    if (!fresh && it->second != args.size())
      fail(name,
           "predicate " + name.text + " used with arity " + std::to_string(args.size()) +
               ", previously " + std::to_string(it->second),
           {});
    return Formula::atom(Pred::named(name.text), std::move(args));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, std::size_t> arity_;
};

bool self_delimiting(const Formula& f) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
    case Kind::Atom:
    case Kind::NegAtom:
    case Kind::Not:
      return true;
    default:
      return false;
  }
}

void print_atom(const Formula& f, std::string& out) {
  out += f.pred().name();
  if (f.args().empty()) return;
  out += '(';
  for (std::size_t i = 0; i < f.args().size(); ++i) {
    if (i) out += ',';
    out += f.args()[i].name();
  }
  out += ')';
}

void print_rec(const Formula& f, std::string& out);

void print_wrapped(const Formula& f, std::string& out) {
  if (self_delimiting(f)) {
    print_rec(f, out);
  } else {
    out += '(';
    print_rec(f, out);
    out += ')';
  }
}

void print_rec(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case Kind::True:
      out += "true";
      return;
    case Kind::False:
      out += "false";
      return;
    case Kind::Atom:
      print_atom(f, out);
      return;
    case Kind::NegAtom:
      out += '~';
      print_atom(f, out);
      return;
    case Kind::Not:
      out += "~(";
      print_rec(f.body(), out);
      out += ')';
      return;
    case Kind::And:
    case Kind::Or:
    case Kind::Implies:
    case Kind::Iff: {
      static const char* ops[] = {" & ", " | ", " -> ", " <-> "};
      int op = f.kind() == Kind::And ? 0 : f.kind() == Kind::Or ? 1 : f.kind() == Kind::Implies ? 2 : 3;
      print_wrapped(f.lhs(), out);
      out += ops[op];
      print_wrapped(f.rhs(), out);
      return;
    }
    case Kind::Box:
      out += "box ";
      print_wrapped(f.body(), out);
      return;
    case Kind::Dia:
      out += "dia ";
      print_wrapped(f.body(), out);
      return;
    case Kind::Forall:
    case Kind::Exists:
      out += f.kind() == Kind::Forall ? "forall " : "exists ";
      out += f.bound().name();
      out += ". ";
      print_wrapped(f.body(), out);
      return;
  }
}

}  // namespace

Formula parse(std::string_view text) {
  Parser p(lex(text));
  return p.document();
}

std::string print(const Formula& f) {
  std::string out;
  print_rec(f, out);
  return out;
}

}  // namespace bfoml
