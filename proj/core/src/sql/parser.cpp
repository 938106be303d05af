#include "clausefuzz/sql/parser.hpp"

#include <cctype>
#include <cstdlib>

namespace cf::sql {
namespace {

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;   // identifier upper-cased copy in `upper`
  std::string upper;
  size_t offset = 0;
  bool is_real = false;
};

struct Lexer {
  const std::string& src;
  size_t pos = 0;

  explicit Lexer(const std::string& s) : src(s) {}

  Token next() {
    while (pos < src.size() && std::isspace((unsigned char)src[pos])) ++pos;
    // -- line comments
    if (pos + 1 < src.size() && src[pos] == '-' && src[pos + 1] == '-') {
      while (pos < src.size() && src[pos] != '\n') ++pos;
      return next();
    }
    Token t;
    t.offset = pos;
    if (pos >= src.size()) return t;
    char c = src[pos];
    if (std::isalpha((unsigned char)c) || c == '_') {
      size_t b = pos;
      while (pos < src.size() &&
             (std::isalnum((unsigned char)src[pos]) || src[pos] == '_'))
        ++pos;
      t.kind = Tok::Ident;
      t.text = src.substr(b, pos - b);
      t.upper = t.text;
      for (auto& ch : t.upper) ch = std::toupper((unsigned char)ch);
      return t;
    }
    if (std::isdigit((unsigned char)c) ||
        (c == '.' && pos + 1 < src.size() && std::isdigit((unsigned char)src[pos + 1]))) {
      size_t b = pos;
      bool real = false;
      while (pos < src.size() && std::isdigit((unsigned char)src[pos])) ++pos;
      if (pos < src.size() && src[pos] == '.') {
        real = true;
        ++pos;
        while (pos < src.size() && std::isdigit((unsigned char)src[pos])) ++pos;
      }
      if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
        real = true;
        ++pos;
        if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) ++pos;
        while (pos < src.size() && std::isdigit((unsigned char)src[pos])) ++pos;
      }
      t.kind = Tok::Number;
      t.text = src.substr(b, pos - b);
      t.is_real = real;
      return t;
    }
    if (c == '\'') {
      ++pos;
      std::string out;
      while (pos < src.size()) {
        if (src[pos] == '\'') {
          if (pos + 1 < src.size() && src[pos + 1] == '\'') {
            out += '\'';
            pos += 2;
            continue;
          }
          ++pos;
          t.kind = Tok::String;
          t.text = std::move(out);
          return t;
        }
        out += src[pos++];
      }
      throw SyntaxError(t.offset, "closing quote");
    }
    // multi-char operators
    static const char* two[] = {"<=", ">=", "<>", "!=", "=="};
    for (const char* op : two) {
      if (src.compare(pos, 2, op) == 0) {
        t.kind = Tok::Punct;
        t.text = op;
        pos += 2;
        return t;
      }
    }
    t.kind = Tok::Punct;
    t.text = std::string(1, c);
    ++pos;
    return t;
  }
};

struct Parser {
  std::vector<Token> toks;
  size_t i = 0;

  explicit Parser(const std::string& text) {
    Lexer lx(text);
    for (;;) {
      Token t = lx.next();
      bool end = t.kind == Tok::End;
      toks.push_back(std::move(t));
      if (end) break;
    }
  }

  const Token& peek(size_t k = 0) const {
    size_t j = i + k;
    return j < toks.size() ? toks[j] : toks.back();
  }
  const Token& advance() { return toks[i < toks.size() - 1 ? i++ : i]; }
  bool at_end() const { return peek().kind == Tok::End; }

  bool is_kw(const char* kw, size_t k = 0) const {
    return peek(k).kind == Tok::Ident && peek(k).upper == kw;
  }
  bool eat_kw(const char* kw) {
    if (!is_kw(kw)) return false;
    advance();
    return true;
  }
  void expect_kw(const char* kw) {
    if (!eat_kw(kw)) throw SyntaxError(peek().offset, kw);
  }
  bool is_punct(const char* p, size_t k = 0) const {
    return peek(k).kind == Tok::Punct && peek(k).text == p;
  }
  bool eat_punct(const char* p) {
    if (!is_punct(p)) return false;
    advance();
    return true;
  }
  void expect_punct(const char* p) {
    if (!eat_punct(p)) throw SyntaxError(peek().offset, std::string("'") + p + "'");
  }

  std::string ident() {
    if (peek().kind != Tok::Ident) throw SyntaxError(peek().offset, "identifier");
    return advance().text;
  }

  // ---- expressions -------------------------------------------------------

  std::unique_ptr<Expr> expr() { return or_expr(); }

  std::unique_ptr<Expr> or_expr() {
    auto lhs = and_expr();
    while (is_kw("OR")) {
      advance();
      lhs = make_binary(BinOp::Or, std::move(lhs), and_expr());
    }
    return lhs;
  }

  std::unique_ptr<Expr> and_expr() {
    auto lhs = not_expr();
    while (is_kw("AND")) {
      advance();
      lhs = make_binary(BinOp::And, std::move(lhs), not_expr());
    }
    return lhs;
  }

  std::unique_ptr<Expr> not_expr() {
    if (is_kw("NOT") && !is_kw("EXISTS", 1)) {
      advance();
      return make_unary(UnOp::Not, not_expr());
    }
    return predicate();
  }

  std::unique_ptr<Expr> predicate() {
    auto lhs = primary();
    for (;;) {
      if (peek().kind == Tok::Punct) {
        const std::string& p = peek().text;
        BinOp op;
        if (p == "=" || p == "==") op = BinOp::Eq;
        else if (p == "<>" || p == "!=") op = BinOp::Ne;
        else if (p == "<") op = BinOp::Lt;
        else if (p == "<=") op = BinOp::Le;
        else if (p == ">") op = BinOp::Gt;
        else if (p == ">=") op = BinOp::Ge;
        else break;
        advance();
        lhs = make_binary(op, std::move(lhs), primary());
        continue;
      }
      if (is_kw("IS")) {
        advance();
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Truth;
        bool neg = eat_kw("NOT");
        if (eat_kw("TRUE")) e->truth_op = neg ? TruthOp::IsFalse : TruthOp::IsTrue;
        else if (eat_kw("FALSE")) e->truth_op = neg ? TruthOp::IsTrue : TruthOp::IsFalse;
        else if (eat_kw("NULL")) e->truth_op = neg ? TruthOp::NotNull : TruthOp::IsNull;
        else throw SyntaxError(peek().offset, "TRUE, FALSE or NULL");
        e->kids.push_back(std::move(lhs));
        lhs = std::move(e);
        continue;
      }
      if (is_kw("ISNULL") || is_kw("NOTNULL")) {
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Truth;
        e->truth_op = is_kw("ISNULL") ? TruthOp::IsNull : TruthOp::NotNull;
        advance();
        e->kids.push_back(std::move(lhs));
        lhs = std::move(e);
        continue;
      }
      bool neg = false;
      size_t save = i;
      if (is_kw("NOT") && (is_kw("LIKE", 1) || is_kw("IN", 1))) {
        neg = true;
        advance();
      }
      if (is_kw("LIKE")) {
        advance();
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Like;
        e->negated = neg;
        e->kids.push_back(std::move(lhs));
        e->kids.push_back(primary());
        if (eat_kw("ESCAPE")) e->kids.push_back(primary());
        lhs = std::move(e);
        continue;
      }
      if (is_kw("IN")) {
        advance();
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::InList;
        e->negated = neg;
        e->kids.push_back(std::move(lhs));
        expect_punct("(");
        if (!is_punct(")")) {
          e->kids.push_back(expr());
          while (eat_punct(",")) e->kids.push_back(expr());
        }
        expect_punct(")");
        lhs = std::move(e);
        continue;
      }
      i = save;
      break;
    }
    return lhs;
  }

  std::unique_ptr<Expr> primary() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      advance();
      if (t.is_real) return make_literal(Value::real(std::strtod(t.text.c_str(), nullptr)));
      return make_literal(Value::integer(std::strtoll(t.text.c_str(), nullptr, 10)));
    }
    if (t.kind == Tok::String) {
      advance();
      return make_literal(Value::text(t.text));
    }
    if (is_punct("-")) {
      advance();
      auto kid = primary();
      // fold negated numeric literals so '-1.25' reads back as one literal
      if (kid->kind == Expr::Kind::Literal && kid->lit.is_numeric()) {
        Value v = kid->lit.is_int() ? Value::integer(-kid->lit.as_int())
                                    : Value::real(-kid->lit.as_real());
        return make_literal(std::move(v));
      }
      return make_unary(UnOp::Neg, std::move(kid));
    }
    if (is_punct("+")) {
      advance();
      return primary();
    }
    if (is_punct("(")) {
      advance();
      auto e = expr();
      expect_punct(")");
      return e;
    }
    if (t.kind != Tok::Ident) throw SyntaxError(t.offset, "expression");

    if (is_kw("NULL")) { advance(); return make_literal(Value::null()); }
    if (is_kw("TRUE")) { advance(); return make_literal(Value::integer(1)); }
    if (is_kw("FALSE")) { advance(); return make_literal(Value::integer(0)); }

    if (is_kw("CAST")) {
      advance();
      expect_punct("(");
      auto k = expr();
      expect_kw("AS");
      std::string ty = ident();
      for (auto& c : ty) c = std::toupper((unsigned char)c);
      expect_punct(")");
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Cast;
      e->cast_type = ty;
      e->kids.push_back(std::move(k));
      return e;
    }
    if (is_kw("EXISTS") || (is_kw("NOT") && is_kw("EXISTS", 1))) {
      bool neg = eat_kw("NOT");
      expect_kw("EXISTS");
      expect_punct("(");
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Exists;
      e->negated = neg;
      e->sub = select_body();
      expect_punct(")");
      return e;
    }
    if (is_kw("LIKELY") || is_kw("UNLIKELY")) {
      Wrapper w = is_kw("LIKELY") ? Wrapper::Likely : Wrapper::Unlikely;
      if (is_punct("(", 1)) {
        advance();
        advance();
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Wrap;
        e->wrap = w;
        e->kids.push_back(expr());
        expect_punct(")");
        return e;
      }
    }
    if ((is_kw("MIN") || is_kw("COUNT") || is_kw("TOTAL")) && is_punct("(", 1)) {
      AggFn fn = is_kw("MIN") ? AggFn::Min : is_kw("COUNT") ? AggFn::Count : AggFn::Total;
      advance();
      advance();
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Agg;
      e->agg = fn;
      if (is_punct("*")) {
        advance();
        e->star = true;
      } else {
        e->kids.push_back(expr());
      }
      expect_punct(")");
      return e;
    }

    // column reference, optionally qualified
    std::string first = ident();
    if (eat_punct(".")) {
      std::string col = ident();
      return make_column(first, col);
    }
    return make_column("", first);
  }

  // ---- statements --------------------------------------------------------

  std::unique_ptr<Select> select_body() {
    expect_kw("SELECT");
    auto s = std::make_unique<Select>();
    if (eat_kw("DISTINCT")) s->distinct = true;
    else eat_kw("ALL");
    for (;;) {
      SelectItem it;
      if (is_punct("*")) {
        advance();
        it.star = true;
      } else {
        it.expr = expr();
        if (eat_kw("AS")) it.alias = ident();
      }
      s->items.push_back(std::move(it));
      if (!eat_punct(",")) break;
    }
    if (eat_kw("FROM")) s->from = ident();
    if (eat_kw("WHERE")) s->where = expr();
    if (is_kw("ORDER")) {
      advance();
      expect_kw("BY");
      for (;;) {
        OrderTerm t;
        t.expr = expr();
        if (eat_kw("DESC")) t.desc = true;
        else eat_kw("ASC");
        s->order_by.push_back(std::move(t));
        if (!eat_punct(",")) break;
      }
    }
    return s;
  }

  ColumnDef column_def() {
    ColumnDef c;
    c.name = ident();
    // optional declared type: one or two identifier words, not a constraint keyword
    auto is_constraint = [this] {
      return is_kw("COLLATE") || is_kw("PRIMARY") || is_kw("NOT") || is_kw("UNIQUE") ||
             is_kw("DEFAULT");
    };
    while (peek().kind == Tok::Ident && !is_constraint()) {
      std::string w = advance().upper;
      if (!c.decl_type.empty()) c.decl_type += ' ';
      c.decl_type += w;
      if (eat_punct("(")) {  // e.g. VARCHAR(10)
        c.decl_type += '(';
        while (!is_punct(")")) c.decl_type += advance().text;
        expect_punct(")");
        c.decl_type += ')';
      }
    }
    for (;;) {
      if (eat_kw("COLLATE")) {
        std::string coll = ident();
        for (auto& ch : coll) ch = std::toupper((unsigned char)ch);
        if (coll == "NOCASE") c.collation = Collation::Nocase;
        else if (coll == "RTRIM") c.collation = Collation::Rtrim;
        else if (coll == "BINARY") c.collation = Collation::Binary;
        else throw SyntaxError(peek().offset, "collation name");
        continue;
      }
      if (is_kw("PRIMARY")) {
        advance();
        expect_kw("KEY");
        c.primary_key = true;
        if (eat_kw("DESC")) c.pk_desc = true;
        else eat_kw("ASC");
        continue;
      }
      break;
    }
    return c;
  }

  SqlStatement statement() {
    SqlStatement st;
    st.src_begin = peek().offset;
    if (is_kw("SELECT")) {
      st.kind = SqlStatement::Kind::Select;
      st.select = select_body();
      return st;
    }
    if (is_kw("PRAGMA")) {
      advance();
      st.kind = SqlStatement::Kind::Pragma;
      st.pragma = std::make_unique<Pragma>();
      st.pragma->name = ident();
      if (eat_punct("=")) {
        if (peek().kind == Tok::Number || peek().kind == Tok::Ident ||
            peek().kind == Tok::String)
          st.pragma->value = advance().text;
        else
          throw SyntaxError(peek().offset, "pragma value");
      }
      return st;
    }
    if (is_kw("INSERT")) {
      advance();
      auto in = std::make_unique<Insert>();
      if (eat_kw("OR")) {
        expect_kw("FAIL");
        in->or_fail = true;
      }
      expect_kw("INTO");
      in->table = ident();
      if (eat_punct("(")) {
        in->columns.push_back(ident());
        while (eat_punct(",")) in->columns.push_back(ident());
        expect_punct(")");
      }
      expect_kw("VALUES");
      for (;;) {
        expect_punct("(");
        std::vector<std::unique_ptr<Expr>> row;
        row.push_back(expr());
        while (eat_punct(",")) row.push_back(expr());
        expect_punct(")");
        in->rows.push_back(std::move(row));
        if (!eat_punct(",")) break;
      }
      st.kind = SqlStatement::Kind::Insert;
      st.insert = std::move(in);
      return st;
    }
    if (is_kw("CREATE")) {
      advance();
      if (is_kw("TABLE")) {
        advance();
        auto ct = std::make_unique<CreateTable>();
        ct->name = ident();
        expect_punct("(");
        for (;;) {
          if (is_kw("PRIMARY")) {
            advance();
            expect_kw("KEY");
            expect_punct("(");
            ct->table_pk.push_back(ident());
            while (eat_punct(",")) ct->table_pk.push_back(ident());
            expect_punct(")");
          } else {
            ct->columns.push_back(column_def());
          }
          if (!eat_punct(",")) break;
        }
        expect_punct(")");
        if (eat_kw("WITHOUT")) {
          expect_kw("ROWID");
          ct->without_rowid = true;
        }
        st.kind = SqlStatement::Kind::CreateTable;
        st.create_table = std::move(ct);
        return st;
      }
      if (is_kw("INDEX") || (is_kw("UNIQUE") && is_kw("INDEX", 1))) {
        eat_kw("UNIQUE");
        expect_kw("INDEX");
        auto ci = std::make_unique<CreateIndex>();
        ci->name = ident();
        expect_kw("ON");
        ci->table = ident();
        expect_punct("(");
        ci->columns.push_back(ident());
        while (eat_punct(",")) ci->columns.push_back(ident());
        expect_punct(")");
        if (eat_kw("WHERE")) ci->where = expr();
        st.kind = SqlStatement::Kind::CreateIndex;
        st.create_index = std::move(ci);
        return st;
      }
      if (is_kw("VIEW")) {
        advance();
        auto cv = std::make_unique<CreateView>();
        cv->name = ident();
        expect_kw("AS");
        cv->select = select_body();
        st.kind = SqlStatement::Kind::CreateView;
        st.create_view = std::move(cv);
        return st;
      }
      throw SyntaxError(peek().offset, "TABLE, INDEX or VIEW");
    }
    throw SyntaxError(peek().offset, "statement");
  }
};

}  // namespace

StatementList parse(const std::string& text) {
  Parser p(text);
  StatementList out;
  while (!p.at_end()) {
    size_t stmt_begin = p.peek().offset;
    size_t save = p.i;
    SqlStatement st;
    try {
      st = p.statement();
      if (!p.eat_punct(";")) throw SyntaxError(p.peek().offset, "';'");
    } catch (const SyntaxError&) {
      // Unsupported real-DBMS syntax is preserved verbatim so external
      // fixtures can be replayed; a statement that does not even start with
      // a statement keyword is a genuine syntax error.
      p.i = save;
      static const char* heads[] = {"CREATE", "SELECT", "INSERT", "PRAGMA",
                                    "WITH",   "UPDATE", "DELETE", "ALTER"};
      bool known_head = false;
      for (const char* h : heads) known_head |= p.is_kw(h);
      if (!known_head) throw;
      size_t end = std::string::npos;
      while (!p.at_end() && !p.is_punct(";")) p.advance();
      if (!p.at_end()) {
        end = p.peek().offset;
        p.advance();
      } else {
        throw SyntaxError(stmt_begin, "';'");
      }
      st = SqlStatement{};
      st.kind = SqlStatement::Kind::Raw;
      st.raw = std::make_unique<RawStatement>();
      std::string rawtext = text.substr(stmt_begin, end - stmt_begin);
      while (!rawtext.empty() && std::isspace((unsigned char)rawtext.back()))
        rawtext.pop_back();
      st.raw->text = std::move(rawtext);
      st.src_begin = stmt_begin;
      st.src_end = end;
      out.push_back(std::move(st));
      continue;
    }
    st.src_end = p.i < p.toks.size() ? p.peek().offset : text.size();
    st.src_begin = stmt_begin;
    out.push_back(std::move(st));
  }
  return out;
}

std::unique_ptr<Expr> parse_expression(const std::string& text) {
  Parser p(text);
  auto e = p.expr();
  if (!p.at_end()) throw SyntaxError(p.peek().offset, "end of expression");
  return e;
}

}  // namespace cf::sql
