#include "csn/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "csn/names.hpp"

namespace csn {

namespace {

enum class Tok {
    End,
    Ident,
    Number,
    String,
    KeyLit,
    Dot,
    Comma,
    Semi,
    Bar,
    LBracket,
    RBracket,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Equals,
    At,
    Bang,
    Plus,
    Minus,
    Colon,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double number = 0;
    std::uint64_t key = 0;
    int line = 1, col = 1;
};

[[noreturn]] void fail(const Token& at, const std::string& msg,
                       ParseError::Kind kind = ParseError::Kind::Generic) {
    throw ParseError(kind, msg, at.line, at.col);
}

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    const Token& peek(std::size_t ahead = 0) {
        while (buffer_.size() <= ahead) buffer_.push_back(lex());
        return buffer_[ahead];
    }

    Token next() {
        Token t = peek();
        buffer_.erase(buffer_.begin());
        return t;
    }

private:
    char cur() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    char lookahead(std::size_t n) const {
        return pos_ + n < text_.size() ? text_[pos_ + n] : '\0';
    }

    void bump() {
        if (cur() == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space() {
        for (;;) {
            while (std::isspace(static_cast<unsigned char>(cur()))) bump();
            if (cur() == '/' && lookahead(1) == '/') {
                while (cur() != '\0' && cur() != '\n') bump();
                continue;
            }
            break;
        }
    }

    Token lex() {
        skip_space();
        Token t;
        t.line = line_;
        t.col = col_;
        char c = cur();
        if (c == '\0') {
            t.kind = Tok::End;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string word;
            while (std::isalnum(static_cast<unsigned char>(cur())) || cur() == '_') {
                word.push_back(cur());
                bump();
            }
            // opaque key literals print as key#<hex> and must re-parse
            if (word == "key" && cur() == '#') {
                bump();
                std::string hex;
                while (std::isxdigit(static_cast<unsigned char>(cur()))) {
                    hex.push_back(cur());
                    bump();
                }
                if (hex.empty()) fail(t, "expected hex digits after 'key#'");
                t.kind = Tok::KeyLit;
                t.key = std::strtoull(hex.c_str(), nullptr, 16);
                t.text = "key#" + hex;
                return t;
            }
            t.kind = Tok::Ident;
            t.text = word;
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string num;
            while (std::isdigit(static_cast<unsigned char>(cur()))) {
                num.push_back(cur());
                bump();
            }
            if (cur() == '.' && std::isdigit(static_cast<unsigned char>(lookahead(1)))) {
                num.push_back(cur());
                bump();
                while (std::isdigit(static_cast<unsigned char>(cur()))) {
                    num.push_back(cur());
                    bump();
                }
            }
            if (cur() == 'e' || cur() == 'E') {
                std::string exp(1, cur());
                bump();
                if (cur() == '+' || cur() == '-') {
                    exp.push_back(cur());
                    bump();
                }
                if (!std::isdigit(static_cast<unsigned char>(cur())))
                    fail(t, "malformed exponent in number");
                while (std::isdigit(static_cast<unsigned char>(cur()))) {
                    exp.push_back(cur());
                    bump();
                }
                num += exp;
            }
            t.kind = Tok::Number;
            t.text = num;
            t.number = std::strtod(num.c_str(), nullptr);
            return t;
        }
        if (c == '"') {
            bump();
            std::string s;
            while (cur() != '"') {
                if (cur() == '\0') fail(t, "unterminated string");
                s.push_back(cur());
                bump();
            }
            bump();
            t.kind = Tok::String;
            t.text = s;
            return t;
        }
        bump();
        switch (c) {
            case '.': t.kind = Tok::Dot; break;
            case ',': t.kind = Tok::Comma; break;
            case ';': t.kind = Tok::Semi; break;
            case '|': t.kind = Tok::Bar; break;
            case '[': t.kind = Tok::LBracket; break;
            case ']': t.kind = Tok::RBracket; break;
            case '(': t.kind = Tok::LParen; break;
            case ')': t.kind = Tok::RParen; break;
            case '{': t.kind = Tok::LBrace; break;
            case '}': t.kind = Tok::RBrace; break;
            case '=': t.kind = Tok::Equals; break;
            case '@': t.kind = Tok::At; break;
            case '!': t.kind = Tok::Bang; break;
            case '+': t.kind = Tok::Plus; break;
            case '-': t.kind = Tok::Minus; break;
            case ':': t.kind = Tok::Colon; break;
            default: fail(t, std::string("unexpected character '") + c + "'");
        }
        t.text = std::string(1, c);
        return t;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    std::vector<Token> buffer_;
};

bool lowercase_led(const std::string& name) {
    return !name.empty() && (std::islower(static_cast<unsigned char>(name[0])) || name[0] == '_');
}
bool uppercase_led(const std::string& name) {
    return !name.empty() && std::isupper(static_cast<unsigned char>(name[0]));
}

struct SensorAttrs {
    std::optional<Pos> position;
    std::optional<double> radius;
    std::optional<Energy> battery;
    Heap heap;
    Token at;
};

class Parser {
public:
    Parser(const std::string& text, std::string base_dir)
        : lex_(text), base_dir_(std::move(base_dir)) {}

    ParsedNetwork parse_document() {
        bool saw_network = false;
        Token network_at;
        while (lex_.peek().kind != Tok::End) {
            const Token& t = lex_.peek();
            if (t.kind == Tok::At) {
                parse_at_line();
            } else if (t.kind == Tok::LBracket ||
                       (t.kind == Tok::Ident && t.text == "off" && lex_.peek(1).kind != Tok::Equals)) {
                if (saw_network) fail(t, "multiple network lines");
                saw_network = true;
                network_at = t;
                parse_network_line();
            } else if (t.kind == Tok::Ident) {
                parse_module_def();
            } else {
                fail(t, "expected module definition, network line or @-line");
            }
        }
        if (!saw_network) {
            Token t = lex_.peek();
            fail(t, "document has no network line");
        }
        apply_attrs();
        ParsedNetwork out;
        out.network.sensors = std::move(sensors_);
        out.field = field_.value_or(FieldSpec{});
        out.has_field = field_.has_value();
        return out;
    }

    ProgramPtr parse_program_fragment() {
        auto p = parse_program();
        expect(Tok::End, "end of input");
        return p;
    }

    ModulePtr parse_module_fragment() {
        expect(Tok::LBrace, "'{'");
        auto m = parse_module_body();
        expect(Tok::End, "end of input");
        return m;
    }

    FieldSpec parse_field_fragment() {
        auto f = parse_field_spec();
        expect(Tok::End, "end of input");
        return f;
    }

private:
    // ---- lexer helpers --------------------------------------------------

    Token expect(Tok kind, const std::string& what) {
        Token t = lex_.next();
        if (t.kind != kind) fail(t, "expected " + what);
        return t;
    }

    bool accept(Tok kind) {
        if (lex_.peek().kind == kind) {
            lex_.next();
            return true;
        }
        return false;
    }

    bool peek_ident(const std::string& word, std::size_t ahead = 0) {
        const Token& t = lex_.peek(ahead);
        return t.kind == Tok::Ident && t.text == word;
    }

    double parse_signed_number() {
        bool neg = accept(Tok::Minus);
        Token t = expect(Tok::Number, "a number");
        return neg ? -t.number : t.number;
    }

    Energy parse_energy_value() {
        bool neg = accept(Tok::Minus);
        Token t = expect(Tok::Number, "a number");
        Energy e;
        try {
            e = Energy::parse(t.text);
        } catch (const EnergyError& err) {
            fail(t, err.what());
        }
        return neg ? Energy{} - e : e;
    }

    Pos parse_position_literal() {
        expect(Tok::LParen, "'('");
        double x = parse_signed_number();
        expect(Tok::Comma, "','");
        double y = parse_signed_number();
        expect(Tok::RParen, "')'");
        return Pos{x, y};
    }

    // ---- binder scopes ---------------------------------------------------

    bool is_bound(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
            if (it->count(name)) return true;
        return false;
    }

    void check_binder(const Token& t) {
        if (is_reserved_name(t.text) || is_keyword(t.text))
            fail(t, "'" + t.text + "' is reserved and cannot be bound",
                 ParseError::Kind::ReservedName);
        if (uppercase_led(t.text)) fail(t, "binders must not start uppercase");
    }

    // ---- values -----------------------------------------------------------

    Value parse_value() {
        const Token& t = lex_.peek();
        switch (t.kind) {
            case Tok::Number:
                return Value{MeasureVal{lex_.next().number}};
            case Tok::Minus: {
                lex_.next();
                Token n = expect(Tok::Number, "a number after '-'");
                return Value{MeasureVal{-n.number}};
            }
            case Tok::LParen: {
                Pos pos = parse_position_literal();
                return Value{PositionVal{pos}};
            }
            case Tok::LBrace: {
                lex_.next();
                return Value{ModuleVal{parse_module_body()}};
            }
            case Tok::KeyLit:
                return Value{KeyVal{lex_.next().key}};
            case Tok::Ident:
                return parse_ident_value(lex_.next());
            default:
                fail(t, "expected a value");
        }
    }

    Value parse_ident_value(const Token& t) {
        const std::string& name = t.text;
        if (name == "_") return Value{UnitVal{}};
        if (name == "true") return Value{BoolVal{true}};
        if (name == "false") return Value{BoolVal{false}};
        if (name == "p") return Value{SelfAttrVal{SelfAttr::Position}};
        if (name == "r") return Value{SelfAttrVal{SelfAttr::Radius}};
        if (name == "b") return Value{SelfAttrVal{SelfAttr::Battery}};
        if (is_keyword(name)) fail(t, "'" + name + "' cannot appear as a value");
        if (is_bound(name)) return Value{VarRef{name}};
        if (uppercase_led(name)) {
            auto it = module_defs_.find(name);
            if (it == module_defs_.end()) fail(t, "unknown module name '" + name + "'");
            if (!it->second.params.empty())
                fail(t, "module '" + name + "' takes parameters and cannot be used bare");
            return Value{ModuleVal{it->second.body}};
        }
        return Value{VarRef{name}};  // free variable
    }

    std::vector<Value> parse_value_list(Tok close, const std::string& close_text) {
        std::vector<Value> values;
        if (lex_.peek().kind != close) {
            values.push_back(parse_value());
            while (accept(Tok::Comma)) values.push_back(parse_value());
        }
        expect(close, close_text);
        return values;
    }

    // ---- builtin expressions ----------------------------------------------

    bool at_builtin_call(const char* name) {
        return peek_ident(name) && lex_.peek(1).kind == Tok::LBracket && !is_bound(name);
    }

    BExpr parse_bexpr() {
        if (accept(Tok::Bang)) return bex_not(parse_bexpr());
        if (accept(Tok::LParen)) {
            BExpr inner = parse_bexpr();
            expect(Tok::RParen, "')'");
            return inner;
        }
        if (at_builtin_call("lookup")) {
            lex_.next();
            lex_.next();
            Value key = parse_value();
            expect(Tok::RBracket, "']'");
            return bex_lookup(std::move(key));
        }
        if (at_builtin_call("get")) {
            lex_.next();
            lex_.next();
            Value key = parse_value();
            expect(Tok::RBracket, "']'");
            return bex_get(std::move(key));
        }
        if (at_builtin_call("hash")) {
            lex_.next();
            lex_.next();
            return bex_hash(parse_value_list(Tok::RBracket, "']'"));
        }
        return bex_value(parse_value());
    }

    // A parenthesized position literal and a parenthesized bexpr both start
    // with '('; conditions only ever need the bexpr reading, and positions
    // in conditions can be written without the outer grouping.

    // ---- programs -----------------------------------------------------------

    ProgramPtr parse_program() {
        ProgramPtr left = parse_seq();
        if (accept(Tok::Bar)) {
            ProgramPtr right = parse_program();
            return make_par(std::move(left), std::move(right));
        }
        return left;
    }

    ProgramPtr parse_seq() {
        bool was_paren_par = false;
        ProgramPtr first = parse_atom(&was_paren_par);
        const Token& t = lex_.peek();
        if (t.kind == Tok::Semi) {
            if (was_paren_par)
                fail(t, "a parallel composition may not be the left operand of ';'");
            lex_.next();
            ProgramPtr rest = parse_seq();
            return make_seq(std::move(first), std::move(rest));
        }
        return first;
    }

    // Atoms; sense/if/let extend maximally to the right, so they return the
    // rest of the thread already folded in.
    ProgramPtr parse_atom(bool* was_paren_par) {
        *was_paren_par = false;
        const Token& t = lex_.peek();
        if (t.kind == Tok::LParen) {
            lex_.next();
            ProgramPtr inner = parse_program();
            expect(Tok::RParen, "')'");
            if (std::holds_alternative<Par>(inner->node)) *was_paren_par = true;
            return inner;
        }
        if (t.kind != Tok::Ident) fail(t, "expected a program");

        if (t.text == "idle") {
            lex_.next();
            return make_idle();
        }
        if (t.text == "install") {
            lex_.next();
            return make_install(parse_value());
        }
        if (t.text == "sense") {
            lex_.next();
            return parse_sense();
        }
        if (t.text == "if") {
            lex_.next();
            return parse_if();
        }
        if (t.text == "let") {
            lex_.next();
            return parse_let();
        }
        if (t.text == "this" || t.text == "net") {
            Target target = t.text == "this" ? Target::This : Target::Net;
            lex_.next();
            expect(Tok::Dot, "'.' after invocation target");
            return parse_invoke(target);
        }
        // bare call sugar: name[args] means this.name[args]
        if (lex_.peek(1).kind == Tok::LBracket) {
            return parse_invoke(Target::This);
        }
        fail(t, "expected a program, found '" + t.text + "'");
    }

    ProgramPtr parse_invoke(Target target) {
        Token name = expect(Tok::Ident, "a method name");
        Value method;
        if (is_bound(name.text)) {
            method = Value{VarRef{name.text}};
        } else {
            if (is_keyword(name.text) || is_reserved_name(name.text))
                fail(name, "'" + name.text + "' cannot name a method");
            if (!lowercase_led(name.text))
                fail(name, "method labels start lowercase; '" + name.text + "' is not a label");
            method = Value{LabelRef{name.text}};
        }
        expect(Tok::LBracket, "'[' to open the argument list");
        std::vector<Value> args = parse_value_list(Tok::RBracket, "']'");
        return make_invoke(target, std::move(method), std::move(args));
    }

    ProgramPtr parse_sense() {
        std::vector<std::string> binders;
        if (accept(Tok::LParen)) {
            Token b = expect(Tok::Ident, "a binder");
            check_binder(b);
            binders.push_back(b.text);
            while (accept(Tok::Comma)) {
                Token more = expect(Tok::Ident, "a binder");
                check_binder(more);
                binders.push_back(more.text);
            }
            expect(Tok::RParen, "')'");
        } else {
            Token b = expect(Tok::Ident, "a binder");
            check_binder(b);
            binders.push_back(b.text);
        }
        std::set<std::string> seen(binders.begin(), binders.end());
        if (seen.size() != binders.size()) {
            Token t = lex_.peek();
            fail(t, "duplicate sense binder");
        }
        Token in = expect(Tok::Ident, "'in'");
        if (in.text != "in") fail(in, "expected 'in'");
        scopes_.push_back(seen);
        ProgramPtr body = parse_program();
        scopes_.pop_back();
        return make_sense(std::move(binders), std::move(body));
    }

    ProgramPtr parse_if() {
        BExpr cond = parse_bexpr();
        Token then = expect(Tok::Ident, "'then'");
        if (then.text != "then") fail(then, "expected 'then'");
        ProgramPtr then_branch = parse_program();
        ProgramPtr else_branch = make_idle();
        if (peek_ident("else")) {
            lex_.next();
            else_branch = parse_program();
        }
        return make_if(std::move(cond), std::move(then_branch), std::move(else_branch));
    }

    ProgramPtr parse_let() {
        Token var = expect(Tok::Ident, "a binder");
        check_binder(var);
        expect(Tok::Equals, "'='");
        BExpr expr = parse_bexpr();
        Token in = expect(Tok::Ident, "'in'");
        if (in.text != "in") fail(in, "expected 'in'");
        scopes_.push_back({var.text});
        ProgramPtr body = parse_program();
        scopes_.pop_back();
        return make_let(var.text, std::move(expr), std::move(body));
    }

    // ---- modules -----------------------------------------------------------

    ModulePtr parse_module_body() {
        Module m;
        while (!accept(Tok::RBrace)) {
            Token label = expect(Tok::Ident, "a method label or '}'");
            if (is_keyword(label.text) || is_reserved_name(label.text))
                fail(label, "'" + label.text + "' cannot be a method label",
                     ParseError::Kind::ReservedName);
            if (!lowercase_led(label.text)) fail(label, "method labels start lowercase");
            if (m.methods.count(label.text))
                fail(label, "duplicate method '" + label.text + "'",
                     ParseError::Kind::DuplicateMethod);
            expect(Tok::Equals, "'='");
            expect(Tok::LParen, "'('");
            std::vector<std::string> params;
            if (lex_.peek().kind != Tok::RParen) {
                Token prm = expect(Tok::Ident, "a parameter");
                check_binder(prm);
                params.push_back(prm.text);
                while (accept(Tok::Comma)) {
                    Token more = expect(Tok::Ident, "a parameter");
                    check_binder(more);
                    params.push_back(more.text);
                }
            }
            expect(Tok::RParen, "')'");
            std::set<std::string> seen(params.begin(), params.end());
            if (seen.size() != params.size()) fail(label, "duplicate parameter");
            scopes_.push_back(seen);
            ProgramPtr body = parse_program();
            scopes_.pop_back();
            m.methods.emplace(label.text, Abstraction{std::move(params), std::move(body)});
        }
        return std::make_shared<const Module>(std::move(m));
    }

    void parse_module_def() {
        Token name = expect(Tok::Ident, "a module name");
        if (!uppercase_led(name.text))
            fail(name, "module definition names start uppercase; found '" + name.text + "'");
        if (module_defs_.count(name.text)) fail(name, "duplicate module '" + name.text + "'");
        std::vector<std::string> params;
        if (accept(Tok::LParen)) {
            if (lex_.peek().kind != Tok::RParen) {
                Token prm = expect(Tok::Ident, "a parameter");
                check_binder(prm);
                params.push_back(prm.text);
                while (accept(Tok::Comma)) {
                    Token more = expect(Tok::Ident, "a parameter");
                    check_binder(more);
                    params.push_back(more.text);
                }
            }
            expect(Tok::RParen, "')'");
        }
        expect(Tok::Equals, "'='");
        expect(Tok::LBrace, "'{'");
        std::set<std::string> seen(params.begin(), params.end());
        scopes_.push_back(seen);
        ModulePtr body = parse_module_body();
        scopes_.pop_back();
        module_defs_.emplace(name.text, ModuleDef{std::move(params), std::move(body)});
    }

    ModulePtr parse_module_expr() {
        if (accept(Tok::LBrace)) return parse_module_body();
        Token name = expect(Tok::Ident, "a module literal or module name");
        if (!uppercase_led(name.text)) fail(name, "module names start uppercase");
        auto it = module_defs_.find(name.text);
        if (it == module_defs_.end()) fail(name, "unknown module name '" + name.text + "'");
        std::vector<Value> args;
        if (accept(Tok::LParen)) args = parse_value_list(Tok::RParen, "')'");
        if (args.size() != it->second.params.size())
            fail(name, "module '" + name.text + "' expects " +
                           std::to_string(it->second.params.size()) + " argument(s), got " +
                           std::to_string(args.size()));
        if (args.empty()) return it->second.body;
        Subst subst;
        for (std::size_t i = 0; i < args.size(); ++i) subst[it->second.params[i]] = args[i];
        return substitute(it->second.body, subst);
    }

    // ---- network line and attributes ----------------------------------------

    void parse_network_line() {
        parse_sensor_element(sensors_);
        while (accept(Tok::Bar)) parse_sensor_element(sensors_);
    }

    void parse_sensor_element(std::vector<Sensor>& into) {
        if (peek_ident("off")) {
            lex_.next();  // off is the unit of composition; nothing to record
            return;
        }
        expect(Tok::LBracket, "'[' or 'off'");
        Sensor s;
        s.program = parse_program();
        expect(Tok::Comma, "',' between program and module");
        s.module = parse_module_expr();
        expect(Tok::RBracket, "']'");
        Token name = expect(Tok::Ident, "a sensor name");
        if (is_keyword(name.text) || is_reserved_name(name.text) || uppercase_led(name.text))
            fail(name, "invalid sensor name '" + name.text + "'");
        s.name = name.text;
        if (!seen_names_.insert(s.name).second) fail(name, "duplicate sensor '" + s.name + "'");
        // defaults; @-lines override after the whole document is read
        s.position = Pos{0, 0};
        s.radius = 10;
        s.battery = Energy::from_units(1000);
        if (accept(Tok::LBrace)) {
            parse_sensor_element(s.bag);
            while (accept(Tok::Comma)) parse_sensor_element(s.bag);
            expect(Tok::RBrace, "'}'");
        }
        into.push_back(std::move(s));
    }

    void parse_at_line() {
        Token at = expect(Tok::At, "'@'");
        Token name = expect(Tok::Ident, "a sensor name or 'field'");
        if (name.text == "field") {
            if (field_) fail(name, "duplicate @field line");
            field_ = parse_field_spec();
            return;
        }
        SensorAttrs attrs;
        attrs.at = name;
        for (;;) {
            if (lex_.peek().kind != Tok::Ident || lex_.peek(1).kind != Tok::Equals) break;
            const std::string& word = lex_.peek().text;
            if (word != "position" && word != "radius" && word != "battery" && word != "heap" &&
                word != "nonce")
                break;  // next document item (e.g. a module definition)
            Token key = lex_.next();
            lex_.next();  // '='
            if (key.text == "position") {
                attrs.position = parse_position_literal();
            } else if (key.text == "radius") {
                attrs.radius = parse_signed_number();
            } else if (key.text == "battery") {
                attrs.battery = parse_energy_value();
            } else if (key.text == "heap") {
                expect(Tok::LBrace, "'{'");
                if (lex_.peek().kind != Tok::RBrace) {
                    do {
                        Token k = expect(Tok::KeyLit, "a key literal");
                        expect(Tok::Colon, "':'");
                        attrs.heap.entries[k.key] = parse_value();
                    } while (accept(Tok::Comma));
                }
                expect(Tok::RBrace, "'}'");
            } else if (key.text == "nonce") {
                Token n = expect(Tok::Number, "a count");
                attrs.heap.nonce = static_cast<std::uint64_t>(n.number);
            } else {
                fail(key, "unknown attribute '" + key.text + "'");
            }
        }
        if (!attr_table_.emplace(name.text, std::move(attrs)).second)
            fail(name, "duplicate @-line for sensor '" + name.text + "'");
    }

    void apply_attrs_to(Sensor& s) {
        auto it = attr_table_.find(s.name);
        if (it != attr_table_.end()) {
            auto& a = it->second;
            if (a.position) s.position = *a.position;
            if (a.radius) s.radius = *a.radius;
            if (a.battery) s.battery = *a.battery;
            s.heap = a.heap;
            applied_.insert(s.name);
        }
        for (auto& inner : s.bag) apply_attrs_to(inner);
    }

    void apply_attrs() {
        for (auto& s : sensors_) apply_attrs_to(s);
        for (const auto& [name, attrs] : attr_table_) {
            if (!applied_.count(name))
                fail(attrs.at, "@-line names unknown sensor '" + name + "'");
        }
    }

    // ---- fields ---------------------------------------------------------------

    FieldSpec parse_field_spec() {
        Token kind = expect(Tok::Ident, "a field kind (constant, grid, analytic)");
        if (kind.text == "constant") {
            expect(Tok::LBracket, "'['");
            FieldSpec::Constant c;
            c.values.push_back(parse_signed_number());
            while (accept(Tok::Comma)) c.values.push_back(parse_signed_number());
            expect(Tok::RBracket, "']'");
            return FieldSpec{c};
        }
        if (kind.text == "grid") {
            FieldSpec::Grid g;
            bool have_file = false;
            while (lex_.peek().kind == Tok::Ident && lex_.peek(1).kind == Tok::Equals) {
                Token key = lex_.next();
                lex_.next();
                if (key.text == "origin") {
                    g.origin = parse_position_literal();
                } else if (key.text == "cell") {
                    g.cell = parse_signed_number();
                    if (g.cell <= 0) fail(key, "grid cell size must be positive");
                } else if (key.text == "file") {
                    Token path = expect(Tok::String, "a quoted file path");
                    g.source = path.text;
                    load_grid(g, path);
                    have_file = true;
                } else {
                    fail(key, "unknown grid attribute '" + key.text + "'");
                }
            }
            if (!have_file) fail(kind, "grid field needs file=\"...\"");
            return FieldSpec{g};
        }
        if (kind.text == "analytic") {
            FieldSpec::Analytic a;
            a.terms.push_back(parse_analytic_term());
            while (accept(Tok::Plus)) a.terms.push_back(parse_analytic_term());
            return FieldSpec{a};
        }
        fail(kind, "unknown field kind '" + kind.text + "'");
    }

    FieldSpec::AnalyticTerm parse_analytic_term() {
        Token name = expect(Tok::Ident, "gaussian, linear or radial");
        expect(Tok::LParen, "'('");
        std::vector<double> args;
        args.push_back(parse_signed_number());
        while (accept(Tok::Comma)) args.push_back(parse_signed_number());
        expect(Tok::RParen, "')'");
        auto want = [&](std::size_t n) {
            if (args.size() != n)
                fail(name, name.text + " takes " + std::to_string(n) + " arguments");
        };
        if (name.text == "gaussian") {
            want(4);
            if (args[3] <= 0) fail(name, "gaussian sigma must be positive");
            return FieldSpec::Gaussian{Pos{args[0], args[1]}, args[2], args[3]};
        }
        if (name.text == "linear") {
            want(3);
            return FieldSpec::Linear{args[0], args[1], args[2]};
        }
        if (name.text == "radial") {
            want(3);
            return FieldSpec::Radial{Pos{args[0], args[1]}, args[2]};
        }
        fail(name, "unknown analytic term '" + name.text + "'");
    }

    void load_grid(FieldSpec::Grid& g, const Token& at) {
        std::string path = g.source;
        if (!path.empty() && path[0] != '/') path = base_dir_ + "/" + path;
        std::ifstream in(path);
        if (!in) fail(at, "cannot open grid file '" + path + "'");
        std::size_t rows = 0, cols = 0, arity = 0;
        if (!(in >> rows >> cols >> arity) || rows == 0 || cols == 0 || arity == 0)
            fail(at, "grid file '" + path + "' must start with rows cols arity");
        g.rows = rows;
        g.cols = cols;
        g.arity = arity;
        g.data.resize(rows * cols * arity);
        for (auto& cell : g.data)
            if (!(in >> cell)) fail(at, "grid file '" + path + "' is truncated");
    }

    struct ModuleDef {
        std::vector<std::string> params;
        ModulePtr body;
    };

    Lexer lex_;
    std::string base_dir_;
    std::vector<std::set<std::string>> scopes_;
    std::map<std::string, ModuleDef> module_defs_;
    std::vector<Sensor> sensors_;
    std::set<std::string> seen_names_;
    std::map<std::string, SensorAttrs> attr_table_;
    std::set<std::string> applied_;
    std::optional<FieldSpec> field_;
};

}  // namespace

ParsedNetwork parse_network(const std::string& text, const std::string& base_dir) {
    Parser p(text, base_dir);
    return p.parse_document();
}

ParsedNetwork parse_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(ParseError::Kind::Generic, "cannot open '" + path + "'", 0, 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    auto slash = path.find_last_of('/');
    std::string dir = slash == std::string::npos ? "." : path.substr(0, slash);
    return parse_network(buf.str(), dir);
}

ProgramPtr parse_program(const std::string& text) {
    Parser p(text, ".");
    return p.parse_program_fragment();
}

ModulePtr parse_module_text(const std::string& text) {
    Parser p(text, ".");
    return p.parse_module_fragment();
}

FieldSpec parse_field_spec(const std::string& text, const std::string& base_dir) {
    Parser p(text, base_dir);
    return p.parse_field_fragment();
}

}  // namespace csn
