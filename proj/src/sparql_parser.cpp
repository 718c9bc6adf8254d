#include "covkg/sparql.hpp"

#include "covkg/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include <fmt/format.h>

namespace covkg::sparql {

namespace {

enum class Tok { iri, pname, var, string, langtag, number, word, punct, eof };

struct Token {
    Tok kind = Tok::eof;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
           static_cast<unsigned char>(c) >= 0x80;
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_ws();
            Token t;
            t.line = line_;
            t.column = column_;
            if (pos_ >= text_.size()) {
                out.push_back(t);
                return out;
            }
            lex(t);
            out.push_back(std::move(t));
        }
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw QuerySyntaxError(line_, column_, msg); }

    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    char get() {
        const char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        return c;
    }

    void skip_ws() {
        while (pos_ < text_.size()) {
            const char c = peek();
            if (c == '#') {
                while (pos_ < text_.size() && peek() != '\n') get();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                get();
            } else {
                break;
            }
        }
    }

    /// `<` opens an IRI only when a `>` follows without whitespace or
    /// characters illegal in IRIs; otherwise it is the less-than operator.
    bool iri_ahead() const {
        for (std::size_t i = pos_ + 1; i < text_.size(); ++i) {
            const char c = text_[i];
            if (c == '>') return true;
            if (std::isspace(static_cast<unsigned char>(c)) || c == '<' || c == '"' || c == '{' || c == '}' ||
                c == '|' || c == '^' || c == '`' || c == '\\') {
                return false;
            }
        }
        return false;
    }

    void lex(Token& t) {
        const char c = peek();
        if (c == '<' && iri_ahead()) {
            get();
            t.kind = Tok::iri;
            while (peek() != '>') t.text += get();
            get();
            return;
        }
        if ((c == '?' || c == '$') && is_name_char(peek(1)) && peek(1) != '-') {
            get();
            t.kind = Tok::var;
            while (is_name_char(peek()) && peek() != '-') t.text += get();
            if (t.text.empty()) fail("empty variable name");
            return;
        }
        if (c == '"' || c == '\'') {
            t.kind = Tok::string;
            t.text = string_body();
            return;
        }
        if (c == '@') {
            get();
            t.kind = Tok::langtag;
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-') t.text += get();
            if (t.text.empty()) fail("empty language tag");
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            ((c == '+' || c == '-' || c == '.') && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            t.kind = Tok::number;
            if (c == '+' || c == '-') t.text += get();
            bool dot = false, exp = false;
            for (;;) {
                const char d = peek();
                if (std::isdigit(static_cast<unsigned char>(d))) {
                    t.text += get();
                } else if (d == '.' && !dot && !exp && std::isdigit(static_cast<unsigned char>(peek(1)))) {
                    dot = true;
                    t.text += get();
                } else if ((d == 'e' || d == 'E') && !exp) {
                    exp = true;
                    t.text += get();
                    if (peek() == '+' || peek() == '-') t.text += get();
                } else {
                    break;
                }
            }
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == ':' || c == '_') {
            std::string word;
            while (is_name_char(peek())) word += get();
            if (peek() == ':') {
                // Prefixed name; the local part may contain inner dots.
                t.kind = Tok::pname;
                t.text = word + get();
                for (;;) {
                    const char d = peek();
                    if (is_name_char(d) || d == ':') {
                        t.text += get();
                    } else if (d == '.' && is_name_char(peek(1))) {
                        t.text += get();
                    } else {
                        break;
                    }
                }
                return;
            }
            if (word.empty()) fail(fmt::format("unexpected character '{}'", c));
            t.kind = Tok::word;
            t.text = word;
            return;
        }
        t.kind = Tok::punct;
        static constexpr std::string_view kTwo[] = {"&&", "||", "!=", "<=", ">=", "^^"};
        for (auto op : kTwo) {
            if (peek() == op[0] && peek(1) == op[1]) {
                t.text = op;
                get();
                get();
                return;
            }
        }
        static constexpr std::string_view kOne = "{}()[].;,/*=<>!^|+?";
        if (kOne.find(c) == std::string_view::npos) fail(fmt::format("unexpected character '{}'", c));
        t.text = std::string(1, get());
    }

    std::string string_body() {
        const char quote = get();
        bool is_long = false;
        if (peek() == quote && peek(1) == quote) {
            get();
            get();
            is_long = true;
        }
        std::string out;
        for (;;) {
            if (pos_ >= text_.size()) fail("unterminated string");
            const char c = get();
            if (c == quote) {
                if (!is_long) return out;
                if (peek() == quote && peek(1) == quote) {
                    get();
                    get();
                    return out;
                }
                out += c;
                continue;
            }
            if (!is_long && c == '\n') fail("line break in string");
            if (c != '\\') {
                out += c;
                continue;
            }
            const char e = pos_ < text_.size() ? get() : '\0';
            switch (e) {
            case 't': out += '\t'; break;
            case 'n': out += '\n'; break;
            case 'r': out += '\r'; break;
            case 'b': out += '\b'; break;
            case 'f': out += '\f'; break;
            case '"': out += '"'; break;
            case '\'': out += '\''; break;
            case '\\': out += '\\'; break;
            case 'u':
            case 'U': {
                const std::size_t n = e == 'u' ? 4 : 8;
                char32_t cp = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    const char h = pos_ < text_.size() ? get() : '\0';
                    if (!std::isxdigit(static_cast<unsigned char>(h))) fail("bad unicode escape");
                    cp = cp * 16 + static_cast<char32_t>(std::isdigit(static_cast<unsigned char>(h))
                                                             ? h - '0'
                                                             : std::tolower(static_cast<unsigned char>(h)) - 'a' + 10);
                }
                rdf::append_utf8(out, cp);
                break;
            }
            default: fail(fmt::format("invalid escape '\\{}'", e));
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

const std::set<std::string>& unsupported_keywords() {
    static const std::set<std::string> kWords{"OPTIONAL", "UNION", "MINUS",  "BIND",     "VALUES", "HAVING",
                                              "DISTINCT", "REDUCED", "OFFSET", "CONSTRUCT", "ASK",  "DESCRIBE",
                                              "INSERT",  "DELETE", "GRAPH",  "FROM",     "LOAD",   "CLEAR"};
    return kWords;
}

class Parser {
public:
    Parser(std::string_view text, const ParseOptions& options)
        : tokens_(Lexer(text).run()), options_(options) {}

    QueryPlan run() {
        QueryPlan plan;
        prologue(plan);
        select_clause(plan);
        if (is_word("WHERE")) next();
        plan.where = group();
        modifiers(plan);
        if (cur().kind != Tok::eof) fail("unexpected trailing input");
        plan.prefixes = prefixes_;
        validate(plan);
        return plan;
    }

private:
    const Token& cur() const { return tokens_[pos_]; }
    const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const std::string& msg) const { fail_at(cur(), msg); }
    [[noreturn]] void fail_at(const Token& t, const std::string& msg) const {
        throw QuerySyntaxError(t.line, t.column, msg);
    }

    bool is_word(std::string_view w) const { return cur().kind == Tok::word && upper(cur().text) == w; }
    bool is_punct(std::string_view p) const { return cur().kind == Tok::punct && cur().text == p; }

    void expect_punct(std::string_view p) {
        if (!is_punct(p)) fail(fmt::format("expected '{}'", p));
        next();
    }

    void check_unsupported() const {
        if (cur().kind != Tok::word) return;
        const std::string w = upper(cur().text);
        if (w == "GROUP") throw UnsupportedFeatureError("GROUP BY");
        if (unsupported_keywords().count(w)) throw UnsupportedFeatureError(w);
    }

    void prologue(QueryPlan&) {
        for (;;) {
            check_unsupported();
            if (is_word("PREFIX")) {
                next();
                if (cur().kind != Tok::pname || cur().text.back() != ':') fail("expected prefix label");
                std::string label = cur().text.substr(0, cur().text.size() - 1);
                next();
                if (cur().kind != Tok::iri) fail("expected IRI in PREFIX");
                prefixes_[label] = cur().text;
                next();
            } else if (is_word("BASE")) {
                throw UnsupportedFeatureError("BASE");
            } else {
                return;
            }
        }
    }

    void select_clause(QueryPlan& plan) {
        check_unsupported();
        if (!is_word("SELECT")) fail("expected SELECT");
        next();
        check_unsupported();
        if (is_punct("*")) {
            plan.select_all = true;
            next();
            return;
        }
        while (cur().kind == Tok::var) {
            projected_tokens_.push_back(cur());
            plan.projection.push_back(user_var(cur()));
            next();
        }
        if (is_punct("(")) throw UnsupportedFeatureError("SELECT expressions");
        if (plan.projection.empty()) fail("expected '*' or variables after SELECT");
    }

    // Pattern positions also take internal path variables so that serialized
    // groups parse again. The counter moves past them to keep fresh names unique.
    std::string pattern_var(const Token& t) {
        const std::string_view name(t.text);
        if (!name.starts_with(kPathVarPrefix)) return t.text;
        std::size_t n = 0;
        const auto digits = name.substr(kPathVarPrefix.size());
        if (std::from_chars(digits.data(), digits.data() + digits.size(), n).ptr == digits.data() + digits.size()) {
            path_vars_ = std::max(path_vars_, n);
        }
        return t.text;
    }

    std::string user_var(const Token& t) const {
        if (std::string_view(t.text).starts_with(kPathVarPrefix)) {
            fail_at(t, fmt::format("variable names starting with '{}' are reserved", kPathVarPrefix));
        }
        return t.text;
    }

    GroupPattern group() {
        expect_punct("{");
        GroupPattern g;
        for (;;) {
            check_unsupported();
            if (is_punct("}")) {
                next();
                return g;
            }
            if (cur().kind == Tok::eof) fail("unterminated group, expected '}'");
            if (is_punct(".")) {
                next();
                continue;
            }
            if (is_punct("{")) {
                const auto& t = cur();
                if (tokens_[pos_ + 1].kind == Tok::word && upper(tokens_[pos_ + 1].text) == "SELECT") {
                    throw UnsupportedFeatureError("subqueries");
                }
                std::size_t depth = 0;
                std::size_t k = pos_;
                for (; k < tokens_.size() && tokens_[k].kind != Tok::eof; ++k) {
                    if (tokens_[k].kind != Tok::punct) continue;
                    if (tokens_[k].text == "{") ++depth;
                    if (tokens_[k].text == "}" && --depth == 0) break;
                }
                if (k + 1 < tokens_.size() && tokens_[k + 1].kind == Tok::word && upper(tokens_[k + 1].text) == "UNION") {
                    throw UnsupportedFeatureError("UNION");
                }
                throw UnsupportedFeatureError("nested group patterns");
            }
            if (is_word("FILTER")) {
                next();
                g.filters.push_back(filter_body());
                continue;
            }
            if (is_word("SERVICE")) {
                next();
                if (is_word("SILENT")) throw UnsupportedFeatureError("SERVICE SILENT");
                ServiceClause s;
                if (cur().kind == Tok::iri) {
                    s.endpoint = cur().text;
                } else if (cur().kind == Tok::pname) {
                    s.endpoint = expand(cur());
                } else if (cur().kind == Tok::var) {
                    throw UnsupportedFeatureError("SERVICE with variable endpoint");
                } else {
                    fail("expected endpoint IRI after SERVICE");
                }
                next();
                s.group = group();
                g.services.push_back(std::move(s));
                continue;
            }
            triples_block(g);
        }
    }

    ExprPtr filter_body() {
        if (is_punct("(")) {
            next();
            ExprPtr e = expression();
            expect_punct(")");
            return e;
        }
        if (cur().kind == Tok::iri || cur().kind == Tok::pname) return primary();
        fail("expected '(' after FILTER");
    }

    void triples_block(GroupPattern& g) {
        const Slot subject = subject_slot();
        for (;;) {
            std::vector<Slot> path = verb();
            for (;;) {
                const Slot object = object_slot();
                add_path(g, subject, path, object);
                if (is_punct(",")) {
                    next();
                    continue;
                }
                break;
            }
            if (is_punct(";")) {
                while (is_punct(";")) next();
                if (is_punct(".") || is_punct("}")) break;
                continue;
            }
            break;
        }
        if (is_punct(".")) {
            next();
        } else if (!is_punct("}") && !is_word("FILTER") && !is_word("SERVICE")) {
            check_unsupported();
            fail("expected '.' or '}' after triple pattern");
        }
    }

    void add_path(GroupPattern& g, const Slot& subject, const std::vector<Slot>& path, const Slot& object) {
        Slot from = subject;
        for (std::size_t i = 0; i < path.size(); ++i) {
            Slot to = object;
            if (i + 1 < path.size()) to = Var{fmt::format("{}{}", kPathVarPrefix, ++path_vars_)};
            g.patterns.push_back({from, path[i], to});
            from = to;
        }
    }

    Slot subject_slot() {
        const Token& t = cur();
        if (t.kind == Tok::var) {
            next();
            return Var{pattern_var(t)};
        }
        if (t.kind == Tok::iri || t.kind == Tok::pname) return iri_slot();
        if (t.kind == Tok::punct && t.text == "[") throw UnsupportedFeatureError("blank node patterns");
        fail("expected subject (variable or IRI)");
    }

    std::vector<Slot> verb() {
        const Token& t = cur();
        if (t.kind == Tok::var) {
            next();
            return {Var{pattern_var(t)}};
        }
        if (t.kind == Tok::word && t.text == "a") {
            next();
            return {rdf::Term::iri(vocab::type)};
        }
        if (is_punct("^")) throw UnsupportedFeatureError("inverse property paths");
        if (is_punct("(")) throw UnsupportedFeatureError("grouped property paths");
        if (t.kind != Tok::iri && t.kind != Tok::pname) fail("expected predicate");
        std::vector<Slot> path{iri_slot()};
        for (;;) {
            if (is_punct("*") || is_punct("+") || is_punct("?") || is_punct("|")) {
                throw UnsupportedFeatureError(fmt::format("property path operator '{}'", cur().text));
            }
            if (!is_punct("/")) break;
            next();
            if (cur().kind == Tok::word && cur().text == "a") {
                next();
                path.emplace_back(rdf::Term::iri(vocab::type));
                continue;
            }
            if (cur().kind != Tok::iri && cur().kind != Tok::pname) fail("sequence paths may only contain IRIs");
            path.push_back(iri_slot());
        }
        return path;
    }

    Slot object_slot() {
        const Token& t = cur();
        if (t.kind == Tok::var) {
            next();
            return Var{pattern_var(t)};
        }
        if (t.kind == Tok::punct && t.text == "[") throw UnsupportedFeatureError("blank node patterns");
        if (t.kind == Tok::punct && t.text == "(") throw UnsupportedFeatureError("RDF collections");
        return term();
    }

    Slot iri_slot() { return rdf::Term::iri(iri_text()); }

    std::string iri_text() {
        const Token& t = cur();
        if (t.kind == Tok::iri) {
            next();
            return t.text;
        }
        if (t.kind == Tok::pname) {
            next();
            return expand(t);
        }
        fail("expected IRI");
    }

    std::string expand(const Token& t) const {
        const auto colon = t.text.find(':');
        const std::string label = t.text.substr(0, colon);
        if (label == "_") throw UnsupportedFeatureError("blank node patterns");
        auto it = prefixes_.find(label);
        if (it != prefixes_.end()) return it->second + t.text.substr(colon + 1);
        auto def = options_.default_prefixes.find(label);
        if (def != options_.default_prefixes.end()) return def->second + t.text.substr(colon + 1);
        fail_at(t, fmt::format("undeclared prefix '{}:'", label));
    }

    /// Constant term: IRI, literal, number or boolean.
    rdf::Term term() {
        const Token& t = cur();
        switch (t.kind) {
        case Tok::iri:
        case Tok::pname: return rdf::Term::iri(iri_text());
        case Tok::string: {
            next();
            if (cur().kind == Tok::langtag) {
                const std::string lang = cur().text;
                next();
                return rdf::Term::lang_literal(t.text, lang);
            }
            if (is_punct("^^")) {
                next();
                return rdf::Term::literal(t.text, iri_text());
            }
            return rdf::Term::literal(t.text);
        }
        case Tok::number: {
            next();
            const bool exp = t.text.find_first_of("eE") != std::string::npos;
            const bool dot = t.text.find('.') != std::string::npos;
            return rdf::Term::literal(t.text, exp ? vocab::xsd_double : dot ? vocab::xsd_decimal : vocab::xsd_integer);
        }
        case Tok::word:
            if (t.text == "true" || t.text == "false") {
                next();
                return rdf::Term::literal(t.text, vocab::xsd_boolean);
            }
            break;
        default: break;
        }
        fail("expected term");
    }

    // Expressions: or -> and -> unary -> relational -> primary.

    ExprPtr expression() {
        ExprPtr left = conjunction();
        while (is_punct("||")) {
            next();
            left = binary(Expr::Op::logical_or, left, conjunction());
        }
        return left;
    }

    ExprPtr conjunction() {
        ExprPtr left = relational();
        while (is_punct("&&")) {
            next();
            left = binary(Expr::Op::logical_and, left, relational());
        }
        return left;
    }

    ExprPtr relational() {
        ExprPtr left = unary();
        static const std::pair<std::string_view, Expr::Op> kOps[] = {
            {"=", Expr::Op::eq}, {"!=", Expr::Op::ne}, {"<", Expr::Op::lt},
            {">", Expr::Op::gt}, {"<=", Expr::Op::le}, {">=", Expr::Op::ge}};
        for (const auto& [text, op] : kOps) {
            if (is_punct(text)) {
                next();
                return binary(op, left, unary());
            }
        }
        return left;
    }

    ExprPtr unary() {
        if (is_punct("!")) {
            next();
            auto e = std::make_shared<Expr>();
            e->op = Expr::Op::logical_not;
            e->args.push_back(unary());
            return e;
        }
        return primary();
    }

    ExprPtr primary() {
        const Token& t = cur();
        if (is_punct("(")) {
            next();
            ExprPtr e = expression();
            expect_punct(")");
            return e;
        }
        if (t.kind == Tok::var) {
            next();
            auto e = std::make_shared<Expr>();
            e->op = Expr::Op::variable;
            e->name = user_var(t);
            return e;
        }
        if (t.kind == Tok::iri || t.kind == Tok::pname) {
            const std::string iri = iri_text();
            auto e = std::make_shared<Expr>();
            if (is_punct("(")) {
                next();
                e->op = Expr::Op::call;
                e->name = iri;
                if (!is_punct(")")) {
                    for (;;) {
                        e->args.push_back(expression());
                        if (!is_punct(",")) break;
                        next();
                    }
                }
                expect_punct(")");
            } else {
                e->op = Expr::Op::constant;
                e->constant = rdf::Term::iri(iri);
            }
            return e;
        }
        if (t.kind == Tok::word && t.text != "true" && t.text != "false") {
            const Token& after = tokens_[pos_ + 1];
            if (after.kind == Tok::punct && after.text == "(") {
                throw UnsupportedFeatureError(fmt::format("built-in function {}", upper(t.text)));
            }
        }
        auto e = std::make_shared<Expr>();
        e->op = Expr::Op::constant;
        e->constant = term();
        return e;
    }

    static ExprPtr binary(Expr::Op op, ExprPtr l, ExprPtr r) {
        auto e = std::make_shared<Expr>();
        e->op = op;
        e->args = {std::move(l), std::move(r)};
        return e;
    }

    void modifiers(QueryPlan& plan) {
        check_unsupported();
        if (is_word("ORDER")) {
            next();
            if (!is_word("BY")) fail("expected BY after ORDER");
            next();
            for (;;) {
                OrderKey key;
                if (is_word("ASC") || is_word("DESC")) {
                    key.descending = is_word("DESC");
                    next();
                    expect_punct("(");
                    if (cur().kind != Tok::var) throw UnsupportedFeatureError("ORDER BY expressions");
                    order_tokens_.push_back(cur());
                    key.variable = user_var(cur());
                    next();
                    expect_punct(")");
                } else if (cur().kind == Tok::var) {
                    order_tokens_.push_back(cur());
                    key.variable = user_var(cur());
                    next();
                } else {
                    break;
                }
                plan.order_by.push_back(std::move(key));
            }
            if (plan.order_by.empty()) fail("expected ORDER BY condition");
        }
        check_unsupported();
        if (is_word("LIMIT")) {
            next();
            if (cur().kind != Tok::number || !std::all_of(cur().text.begin(), cur().text.end(), ::isdigit)) {
                fail("LIMIT expects a non-negative integer");
            }
            plan.limit = std::stoull(cur().text);
            next();
        }
        check_unsupported();
    }

    void validate(const QueryPlan& plan) const {
        std::vector<std::string> pattern_vars;
        collect_pattern_vars(plan.where, pattern_vars);
        auto known = [&](const std::string& v) {
            return std::find(pattern_vars.begin(), pattern_vars.end(), v) != pattern_vars.end();
        };
        for (const auto& t : projected_tokens_) {
            if (!known(t.text)) fail_at(t, fmt::format("projected variable ?{} does not occur in any pattern", t.text));
        }
        for (const auto& t : order_tokens_) {
            if (!known(t.text)) fail_at(t, fmt::format("ORDER BY variable ?{} does not occur in any pattern", t.text));
        }
    }

    static void collect_pattern_vars(const GroupPattern& g, std::vector<std::string>& out) {
        for (const auto& p : g.patterns) {
            for (const Slot* s : {&p.subject, &p.predicate, &p.object}) {
                if (auto v = std::get_if<Var>(s)) out.push_back(v->name);
            }
        }
        for (const auto& s : g.services) collect_pattern_vars(s.group, out);
    }

    std::vector<Token> tokens_;
    const ParseOptions& options_;
    std::size_t pos_ = 0;
    std::size_t path_vars_ = 0;
    vocab::PrefixMap prefixes_;
    std::vector<Token> projected_tokens_;
    std::vector<Token> order_tokens_;
};

void add_unique(std::vector<std::string>& out, const std::string& v) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
}

void collect_expr_vars(const Expr& e, std::vector<std::string>& out) {
    if (e.op == Expr::Op::variable) add_unique(out, e.name);
    for (const auto& a : e.args) collect_expr_vars(*a, out);
}

void collect_group_vars(const GroupPattern& g, std::vector<std::string>& out, bool with_filters) {
    for (const auto& p : g.patterns) {
        for (const Slot* s : {&p.subject, &p.predicate, &p.object}) {
            if (auto v = std::get_if<Var>(s)) add_unique(out, v->name);
        }
    }
    for (const auto& s : g.services) collect_group_vars(s.group, out, with_filters);
    if (with_filters) {
        for (const auto& f : g.filters) collect_expr_vars(*f, out);
    }
}

void append_group(std::string& out, const GroupPattern& g, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    for (const auto& p : g.patterns) {
        out += fmt::format("{}{} {} {} .\n", pad, slot_text(p.subject), slot_text(p.predicate), slot_text(p.object));
    }
    for (const auto& f : g.filters) out += fmt::format("{}FILTER({})\n", pad, expr_text(*f));
    for (const auto& s : g.services) {
        out += fmt::format("{}SERVICE <{}> {{\n", pad, s.endpoint);
        append_group(out, s.group, indent + 1);
        out += pad + "}\n";
    }
}

} // namespace

QueryPlan parse_query(std::string_view text, const ParseOptions& options) {
    return Parser(text, options).run();
}

std::vector<std::string> QueryPlan::result_variables() const {
    if (!select_all) return projection;
    std::vector<std::string> all;
    collect_group_vars(where, all, false);
    std::erase_if(all, [](const std::string& v) { return std::string_view(v).starts_with(kPathVarPrefix); });
    return all;
}

std::vector<std::string> variables_of(const GroupPattern& group) {
    std::vector<std::string> out;
    collect_group_vars(group, out, true);
    return out;
}

std::vector<std::string> bindable_variables(const GroupPattern& group) {
    std::vector<std::string> out;
    collect_group_vars(group, out, false);
    return out;
}

std::vector<std::string> variables_of(const Expr& expr) {
    std::vector<std::string> out;
    collect_expr_vars(expr, out);
    return out;
}

std::string slot_text(const Slot& slot) {
    if (auto v = std::get_if<Var>(&slot)) return "?" + v->name;
    return rdf::to_ntriples(std::get<rdf::Term>(slot));
}

std::string expr_text(const Expr& e) {
    auto bin = [&](std::string_view op) {
        return fmt::format("({} {} {})", expr_text(*e.args[0]), op, expr_text(*e.args[1]));
    };
    switch (e.op) {
    case Expr::Op::variable: return "?" + e.name;
    case Expr::Op::constant: return rdf::to_ntriples(e.constant);
    case Expr::Op::eq: return bin("=");
    case Expr::Op::ne: return bin("!=");
    case Expr::Op::lt: return bin("<");
    case Expr::Op::gt: return bin(">");
    case Expr::Op::le: return bin("<=");
    case Expr::Op::ge: return bin(">=");
    case Expr::Op::logical_and: return bin("&&");
    case Expr::Op::logical_or: return bin("||");
    case Expr::Op::logical_not: return "(!" + expr_text(*e.args[0]) + ")";
    case Expr::Op::call: {
        std::string out = "<" + e.name + ">(";
        for (std::size_t i = 0; i < e.args.size(); ++i) {
            if (i) out += ", ";
            out += expr_text(*e.args[i]);
        }
        return out + ")";
    }
    }
    return {};
}

std::string to_select_query(const GroupPattern& group) {
    std::string out = "SELECT * WHERE {\n";
    append_group(out, group, 1);
    out += "}\n";
    return out;
}

} // namespace covkg::sparql
