#include "vrf/error.hpp"
#include "vrf/formula/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <optional>

namespace vrf::formula {

namespace {

enum class Tok {
    Number,
    Ident,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Quote,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    NotEq,
    AndAnd,
    OrOr,
    Bang,
    End,
};

struct Token {
    Tok kind;
    std::size_t offset;
    std::string_view text;
};

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::size_t start = pos_;
        if (pos_ >= src_.size()) return {Tok::End, start, {}};
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))))
            return number(start);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            return {Tok::Ident, start, src_.substr(start, pos_ - start)};
        }
        auto two = [&](char second) { return pos_ + 1 < src_.size() && src_[pos_ + 1] == second; };
        auto emit = [&](Tok k, std::size_t len) {
            pos_ += len;
            return Token{k, start, src_.substr(start, len)};
        };
        switch (c) {
        case '+': return emit(Tok::Plus, 1);
        case '-': return emit(Tok::Minus, 1);
        case '*': return emit(Tok::Star, 1);
        case '/': return emit(Tok::Slash, 1);
        case '^': return emit(Tok::Caret, 1);
        case '\'': return emit(Tok::Quote, 1);
        case '(': return emit(Tok::LParen, 1);
        case ')': return emit(Tok::RParen, 1);
        case '[': return emit(Tok::LBracket, 1);
        case ']': return emit(Tok::RBracket, 1);
        case ',': return emit(Tok::Comma, 1);
        case '<': return two('=') ? emit(Tok::Le, 2) : emit(Tok::Lt, 1);
        case '>': return two('=') ? emit(Tok::Ge, 2) : emit(Tok::Gt, 1);
        case '=':
            if (two('=')) return emit(Tok::EqEq, 2);
            break;
        case '!': return two('=') ? emit(Tok::NotEq, 2) : emit(Tok::Bang, 1);
        case '&':
            if (two('&')) return emit(Tok::AndAnd, 2);
            break;
        case '|':
            if (two('|')) return emit(Tok::OrOr, 2);
            break;
        default: break;
        }
        throw ParseError(start, "a token (unexpected character '" + std::string(1, c) + "')");
    }

  private:
    Token number(std::size_t start) {
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        };
        digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                digits();
            else
                pos_ = save;
        }
        return {Tok::Number, start, src_.substr(start, pos_ - start)};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

class Parser {
  public:
    explicit Parser(std::string_view src) : lex_(src) { advance(); }

    Expr parse_all() {
        Expr e = parse_or();
        if (cur_.kind != Tok::End) fail("end of input");
        return e;
    }

  private:
    [[noreturn]] void fail(const std::string& expected) const { throw ParseError(cur_.offset, expected); }

    void advance() { cur_ = lex_.next(); }

    bool accept(Tok k) {
        if (cur_.kind != k) return false;
        advance();
        return true;
    }

    void expect(Tok k, const char* what) {
        if (!accept(k)) fail(what);
    }

    Expr parse_or() {
        Expr lhs = parse_and();
        while (accept(Tok::OrOr)) lhs = Expr::binary(BinaryOp::Or, lhs, parse_and());
        return lhs;
    }

    Expr parse_and() {
        Expr lhs = parse_cmp();
        while (accept(Tok::AndAnd)) lhs = Expr::binary(BinaryOp::And, lhs, parse_cmp());
        return lhs;
    }

    Expr parse_cmp() {
        Expr lhs = parse_add();
        for (;;) {
            std::optional<BinaryOp> op;
            switch (cur_.kind) {
            case Tok::Lt: op = BinaryOp::Lt; break;
            case Tok::Le: op = BinaryOp::Le; break;
            case Tok::Gt: op = BinaryOp::Gt; break;
            case Tok::Ge: op = BinaryOp::Ge; break;
            case Tok::EqEq: op = BinaryOp::Eq; break;
            case Tok::NotEq: op = BinaryOp::Ne; break;
            default: return lhs;
            }
            advance();
            lhs = Expr::binary(*op, lhs, parse_add());
        }
    }

    Expr parse_add() {
        Expr lhs = parse_mul();
        for (;;) {
            if (accept(Tok::Plus)) lhs = Expr::binary(BinaryOp::Add, lhs, parse_mul());
            else if (accept(Tok::Minus)) lhs = Expr::binary(BinaryOp::Sub, lhs, parse_mul());
            else return lhs;
        }
    }

    Expr parse_mul() {
        Expr lhs = parse_pow();
        for (;;) {
            if (accept(Tok::Star)) lhs = Expr::binary(BinaryOp::Mul, lhs, parse_pow());
            else if (accept(Tok::Slash)) lhs = Expr::binary(BinaryOp::Div, lhs, parse_pow());
            else return lhs;
        }
    }

    Expr parse_pow() {
        Expr base = parse_unary();
        if (accept(Tok::Caret)) return Expr::binary(BinaryOp::Pow, base, parse_pow());
        return base;
    }

    Expr parse_unary() {
        if (accept(Tok::Minus)) return Expr::unary(UnaryOp::Negate, parse_unary());
        if (accept(Tok::Bang)) return Expr::unary(UnaryOp::Not, parse_unary());
        return parse_postfix();
    }

    Expr parse_postfix() {
        Expr e = parse_primary();
        for (;;) {
            if (accept(Tok::Quote)) {
                e = Expr::unary(UnaryOp::Transpose, e);
            } else if (accept(Tok::LParen)) {
                e = Expr::call(e, parse_args());
            } else {
                return e;
            }
        }
    }

    /// Arguments after an already consumed '('.
    std::vector<Expr> parse_args() {
        std::vector<Expr> args;
        if (accept(Tok::RParen)) return args;
        do {
            args.push_back(parse_or());
        } while (accept(Tok::Comma));
        expect(Tok::RParen, "',' or ')'");
        return args;
    }

    std::vector<Expr> parse_fixed_args(std::size_t n) {
        expect(Tok::LParen, "'('");
        std::vector<Expr> args;
        for (std::size_t i = 0; i < n; ++i) {
            if (i) expect(Tok::Comma, "','");
            args.push_back(parse_or());
        }
        expect(Tok::RParen, "')'");
        return args;
    }

    Expr parse_primary() {
        const Token t = cur_;
        switch (t.kind) {
        case Tok::Number: {
            advance();
            return number_literal(t);
        }
        case Tok::Ident: {
            advance();
            return identifier(t);
        }
        case Tok::LParen: {
            advance();
            Expr e = parse_or();
            expect(Tok::RParen, "')'");
            return e;
        }
        case Tok::LBracket: {
            advance();
            std::vector<Expr> elements;
            do {
                elements.push_back(parse_or());
            } while (accept(Tok::Comma));
            expect(Tok::RBracket, "',' or ']'");
            return Expr::array(std::move(elements));
        }
        default: fail("expression");
        }
    }

    Expr number_literal(const Token& t) {
        const bool integral = t.text.find_first_of(".eE") == std::string_view::npos;
        if (integral) {
            std::int64_t v = 0;
            auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
            if (ec != std::errc() || ptr != t.text.data() + t.text.size())
                throw ParseError(t.offset, "integer literal within 64-bit range");
            return Expr::literal(Value(v));
        }
        // from_chars for double is available, but strtod handles ".5" the same way everywhere.
        std::string s(t.text);
        return Expr::literal(Value(std::strtod(s.c_str(), nullptr)));
    }

    Expr identifier(const Token& t) {
        const std::string name(t.text);
        if (name == "true") return Expr::literal(Value(true));
        if (name == "false") return Expr::literal(Value(false));
        if (name == "inv") return Expr::unary(UnaryOp::Inverse, parse_fixed_args(1)[0]);
        if (name == "delta") return Expr::delta(parse_fixed_args(1)[0]);
        if (name == "cross") return Expr::call(name, parse_fixed_args(2));
        if (accept(Tok::LParen)) return Expr::call(name, parse_args());
        return Expr::variable(name);
    }

    Lexer lex_;
    Token cur_{Tok::End, 0, {}};
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

}  // namespace vrf::formula
