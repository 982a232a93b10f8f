#include "gu/reader.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gu {

ParseError::ParseError(std::string file, int line, int col, const std::string& msg)
    : std::runtime_error(fmt::format("{}:{}:{}: {}", file.empty() ? "<input>" : file,
                                     line, col, msg)),
      file(std::move(file)),
      line(line),
      col(col) {}

namespace {

enum class Tk {
  lbrack,
  rbrack,
  lbrace,
  rbrace,
  colon,
  comma,
  bang,
  hash,
  arrow,
  ident,
  number,
  eof
};

struct Token {
  Tk kind = Tk::eof;
  std::string text;
  double num = 0.0;
  int line = 1;
  int col = 1;
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '_';
}

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '_';
}

class Lexer {
 public:
  Lexer(const std::string& src, std::string file) : src_(src), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.col = col_;
      if (eof()) {
        t.kind = Tk::eof;
        out.push_back(t);
        return out;
      }
      char c = peek();
      if (c == '-' && peek(1) == '>') {
        t.kind = Tk::arrow;
        t.text = "->";
        advance();
        advance();
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = Tk::number;
        t.text = scan_number();
        t.num = std::stod(t.text);
      } else if (ident_start(c)) {
        t.kind = Tk::ident;
        t.text = scan_ident();
      } else {
        switch (c) {
          case '[': t.kind = Tk::lbrack; break;
          case ']': t.kind = Tk::rbrack; break;
          case '{': t.kind = Tk::lbrace; break;
          case '}': t.kind = Tk::rbrace; break;
          case ':': t.kind = Tk::colon; break;
          case ',': t.kind = Tk::comma; break;
          case '!': t.kind = Tk::bang; break;
          case '#': t.kind = Tk::hash; break;
          default:
            throw ParseError(file_, line_, col_,
                             fmt::format("unexpected character '{}'", c));
        }
        t.text = std::string(1, c);
        advance();
      }
      out.push_back(std::move(t));
    }
  }

 private:
  bool eof() const { return pos_ >= src_.size(); }
  char peek(int ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_space() {
    while (!eof()) {
      char c = peek();
      if (c == ';') {
        while (!eof() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }
  std::string scan_ident() {
    std::string s;
    while (!eof() && ident_char(peek())) {
      if (peek() == '-' && peek(1) == '>') break;  // "np->vp" splits at the arrow
      s += peek();
      advance();
    }
    return s;
  }
  std::string scan_number() {
    std::string s;
    auto digits = [&] {
      while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
        s += peek();
        advance();
      }
    };
    digits();
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      s += peek();
      advance();
      digits();
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t mark = pos_;
      int mline = line_, mcol = col_;
      std::string suffix(1, peek());
      advance();
      if (peek() == '+' || peek() == '-') {
        suffix += peek();
        advance();
      }
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        s += suffix;
        digits();
      } else {  // "3e" was an adjacent identifier after all; back out
        pos_ = mark;
        line_ = mline;
        col_ = mcol;
      }
    }
    return s;
  }

  const std::string& src_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Recursive-descent parser over the token stream. Structures are first
// built as a graph of BNodes so reentrancy tags can be resolved (and
// checked for cycles) once a scope — one rule, one lexicon entry, one
// standalone structure — is complete.

class Reader {
 public:
  Reader(const std::string& text, std::string file) : file_(std::move(file)) {
    toks_ = Lexer(text, file_).run();
  }

  FeatureStructure read_single_fs() {
    begin_scope();
    Token first = cur();
    BValue root = parse_value();
    if (cur().kind != Tk::eof)
      throw err(cur(), "unexpected trailing input after the structure");
    return resolve_scope({{root, first.line, first.col}}).front();
  }

  Grammar read_grammar() {
    Grammar g;
    bool have_start = false;
    std::map<std::string, int> per_cat;  // ordinals for automatic rule ids
    std::set<std::string> ids;
    while (cur().kind != Tk::eof) {
      Token t = expect(Tk::colon, "expected a directive (':start' or ':rule')");
      Token name = expect(Tk::ident, "expected a directive name after ':'");
      if (name.text == "start") {
        if (have_start) throw err(name, "duplicate :start directive");
        g.start = expect(Tk::ident, "expected a start symbol").text;
        have_start = true;
      } else if (name.text == "rule") {
        g.rules.push_back(parse_rule(per_cat, ids, t));
      } else {
        throw err(name, fmt::format("unknown directive ':{}'", name.text));
      }
    }
    if (!have_start) {
      throw ParseError(file_, cur().line, cur().col, "grammar has no :start directive");
    }
    return g;
  }

  Lexicon read_lexicon() {
    Lexicon lex;
    int last_line = -1;
    while (cur().kind != Tk::eof) {
      Token word = expect(Tk::ident, "expected a word");
      if (last_line >= 0 && word.line <= last_line)
        throw err(word, fmt::format(
                            "one entry per line: '{}' starts on the line of the "
                            "previous entry",
                            word.text));
      begin_scope();
      if (cur().kind != Tk::lbrack && cur().kind != Tk::hash)
        throw err(cur(), fmt::format("expected a feature structure after '{}'", word.text));
      BValue root = parse_value();
      FeatureStructure fs = resolve_scope({{root, word.line, word.col}}).front();
      last_line = toks_[pos_ - 1].line;
      try {
        lex.add(word.text, std::move(fs));
      } catch (const std::invalid_argument& e) {
        throw err(word, e.what());
      }
    }
    return lex;
  }

 private:
  struct BValue {
    int node = -1;  // index into bnodes_, or
    long tag = -1;  // a reference to resolve later
  };
  struct BArc {
    std::string name;
    BValue val;
    double pri = 1.0;
    bool pri_explicit = false;
    int resolved = -1;
    int line = 1, col = 1;
  };
  struct BNode {
    std::optional<Atom> atom;
    std::vector<BArc> arcs;
    int line = 1, col = 1;
  };
  struct Rooted {
    BValue val;
    int line = 1, col = 1;
  };

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(int ahead = 1) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  Token take() { return toks_[pos_++]; }
  ParseError err(const Token& t, const std::string& msg) const {
    return ParseError(file_, t.line, t.col, msg);
  }
  Token expect(Tk kind, const std::string& msg) {
    if (cur().kind != kind) throw err(cur(), msg);
    return take();
  }

  void begin_scope() {
    bnodes_.clear();
    tag_def_.clear();
    tag_placeholder_.clear();
  }

  int new_bnode(const Token& at) {
    bnodes_.push_back(BNode{});
    bnodes_.back().line = at.line;
    bnodes_.back().col = at.col;
    return static_cast<int>(bnodes_.size()) - 1;
  }

  long parse_tag_number() {
    Token t = expect(Tk::number, "expected a tag number after '#'");
    long n = static_cast<long>(t.num);
    if (static_cast<double>(n) != t.num || t.text.find('.') != std::string::npos)
      throw err(t, "tag numbers must be integers");
    return n;
  }

  // value := '#' INT node? | node; node := complex | atom
  BValue parse_value() {
    if (cur().kind == Tk::hash) {
      Token h = take();
      long tag = parse_tag_number();
      if (cur().kind == Tk::hash)
        throw err(cur(), "a tag cannot be defined as another tag");
      if (cur().kind == Tk::lbrack || cur().kind == Tk::lbrace) {
        int node = parse_node();
        define_tag(tag, node, h);
        return BValue{node, -1};
      }
      return BValue{-1, tag};
    }
    if (cur().kind == Tk::lbrack || cur().kind == Tk::lbrace)
      return BValue{parse_node(), -1};
    throw err(cur(), "expected a value ('[...]', '{...}', or '#tag')");
  }

  void define_tag(long tag, int node, const Token& at) {
    if (!tag_def_.emplace(tag, node).second)
      throw err(at, fmt::format("tag #{} is defined twice", tag));
  }

  int parse_node() {
    if (cur().kind == Tk::lbrace) return parse_atom_node();
    return parse_complex_node();
  }

  int parse_complex_node() {
    Token open = expect(Tk::lbrack, "expected '['");
    int id = new_bnode(open);
    std::set<std::string> seen;
    while (cur().kind != Tk::rbrack) {
      Token name = expect(Tk::ident, "expected a feature name or ']'");
      if (!seen.insert(name.text).second)
        throw err(name, fmt::format("feature '{}' appears twice", name.text));
      expect(Tk::colon, fmt::format("expected ':' after feature '{}'", name.text));
      BArc arc;
      arc.name = name.text;
      arc.line = name.line;
      arc.col = name.col;
      arc.val = parse_value();
      if (cur().kind == Tk::bang) {
        take();
        arc.pri = parse_positive_number("priority");
        arc.pri_explicit = true;
      }
      bnodes_[id].arcs.push_back(std::move(arc));
    }
    take();  // ']'
    return id;
  }

  int parse_atom_node() {
    Token open = expect(Tk::lbrace, "expected '{'");
    int id = new_bnode(open);
    std::vector<std::pair<std::string, double>> disjuncts;
    while (true) {
      Token sym = take();
      if (sym.kind != Tk::ident && sym.kind != Tk::number)
        throw err(sym, "expected a disjunct symbol");
      double w = 1.0;
      if (cur().kind == Tk::colon) {
        take();
        w = parse_nonnegative_number("disjunct weight");
      }
      disjuncts.emplace_back(sym.text, w);
      if (cur().kind == Tk::comma) {
        take();
        continue;
      }
      expect(Tk::rbrace, "expected ',' or '}' in a disjunction");
      break;
    }
    try {
      bnodes_[id].atom = Atom(disjuncts);
    } catch (const std::invalid_argument& e) {
      throw err(open, e.what());
    }
    return id;
  }

  double parse_positive_number(const char* what) {
    double v = parse_signed_number(what);
    if (v <= 0.0) throw err(toks_[pos_ - 1], fmt::format("{} must be positive", what));
    return v;
  }

  double parse_nonnegative_number(const char* what) {
    double v = parse_signed_number(what);
    if (v < 0.0) throw err(toks_[pos_ - 1], fmt::format("{} must not be negative", what));
    return v;
  }

  // Accepts a number token, or an identifier that is really a negative
  // numeral (the lexer folds a leading '-' into identifiers); the range
  // checks above then reject it with a sensible message.
  double parse_signed_number(const char* what) {
    if (cur().kind == Tk::number) return take().num;
    if (cur().kind == Tk::ident && cur().text.size() > 1 && cur().text[0] == '-') {
      const std::string& s = cur().text;
      if (std::all_of(s.begin() + 1, s.end(),
                      [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        return -std::stod(take().text.substr(1));
    }
    throw err(cur(), fmt::format("expected a {}", what));
  }

  // constituent := '#' INT? part | part; part := NAME complex? | complex
  Rooted parse_constituent() {
    Token first = cur();
    long tag = -1;
    if (cur().kind == Tk::hash) {
      take();
      tag = parse_tag_number();
    }
    int node = -1;
    if (cur().kind == Tk::ident) {
      Token name = take();
      if (cur().kind == Tk::lbrack) {
        node = parse_complex_node();
        for (const BArc& a : bnodes_[node].arcs)
          if (a.name == "CAT")
            throw err(name, fmt::format(
                                "'{}' already names the category; remove the "
                                "explicit CAT feature",
                                name.text));
      } else {
        node = new_bnode(name);
      }
      int atom_node = new_bnode(name);
      bnodes_[atom_node].atom = Atom::single(name.text);
      BArc cat;
      cat.name = "CAT";
      cat.val = BValue{atom_node, -1};
      cat.line = name.line;
      cat.col = name.col;
      bnodes_[node].arcs.push_back(std::move(cat));
    } else if (cur().kind == Tk::lbrack) {
      node = parse_complex_node();
    } else {
      throw err(cur(), "expected a constituent (a category name or '[...]')");
    }
    if (tag >= 0) define_tag(tag, node, first);
    return Rooted{BValue{node, -1}, first.line, first.col};
  }

  Rule parse_rule(std::map<std::string, int>& per_cat, std::set<std::string>& ids,
                  const Token& at) {
    begin_scope();
    std::string explicit_id;
    if (cur().kind == Tk::ident && peek().kind == Tk::colon) {
      explicit_id = take().text;
      take();  // ':'
    }
    std::vector<Rooted> roots;
    roots.push_back(parse_constituent());
    expect(Tk::arrow, "expected '->' after the rule's mother");
    while (cur().kind == Tk::hash || cur().kind == Tk::ident || cur().kind == Tk::lbrack)
      roots.push_back(parse_constituent());
    if (roots.size() < 2)
      throw err(cur(), "a rule needs at least one constituent after '->'");

    std::vector<FeatureStructure> fss = resolve_scope(roots);
    for (std::size_t i = 0; i < fss.size(); ++i) {
      auto cat = get_path(fss[i], {"CAT"});
      if (!cat || !cat->is_atom())
        throw ParseError(file_, roots[i].line, roots[i].col,
                         "constituent has no atomic CAT feature");
    }

    Rule r;
    r.lhs = fss[0];
    r.rhs.assign(fss.begin() + 1, fss.end());
    if (!explicit_id.empty()) {
      r.id = explicit_id;
    } else {
      std::string cat = get_path(r.lhs, {"CAT"})->as_atom().argmax().front();
      r.id = fmt::format("{}_{}", cat, ++per_cat[cat]);
    }
    if (!ids.insert(r.id).second)
      throw err(at, fmt::format("duplicate rule id '{}'", r.id));
    return r;
  }

  // Resolves tag references, checks priorities and cycles, and converts
  // the scope's build graph into immutable structures.
  std::vector<FeatureStructure> resolve_scope(const std::vector<Rooted>& roots) {
    auto target_of = [&](const BValue& v) -> int {
      if (v.node >= 0) return v.node;
      auto def = tag_def_.find(v.tag);
      if (def != tag_def_.end()) return def->second;
      auto ph = tag_placeholder_.find(v.tag);
      if (ph != tag_placeholder_.end()) return ph->second;
      bnodes_.push_back(BNode{});  // tags never defined share one empty node
      int id = static_cast<int>(bnodes_.size()) - 1;
      tag_placeholder_[v.tag] = id;
      return id;
    };
    // Index loops: target_of may append placeholder nodes, which would
    // invalidate references into bnodes_.
    for (std::size_t i = 0; i < bnodes_.size(); ++i)
      for (std::size_t j = 0; j < bnodes_[i].arcs.size(); ++j) {
        int r = target_of(bnodes_[i].arcs[j].val);
        bnodes_[i].arcs[j].resolved = r;
      }
    std::vector<int> root_ids;
    root_ids.reserve(roots.size());
    for (const Rooted& root : roots) root_ids.push_back(target_of(root.val));

    for (const BNode& n : bnodes_)
      for (const BArc& a : n.arcs)
        if (a.pri_explicit && !bnodes_[a.resolved].atom &&
            std::abs(a.pri - 1.0) > kEps)
          throw ParseError(file_, a.line, a.col,
                           fmt::format("feature '{}': a priority needs an atomic value",
                                       a.name));

    std::vector<int> color(bnodes_.size(), 0);
    std::map<int, FeatureStructure> memo;
    std::vector<FeatureStructure> out;
    for (int id : root_ids) out.push_back(convert(id, color, memo));
    return out;
  }

  FeatureStructure convert(int id, std::vector<int>& color,
                           std::map<int, FeatureStructure>& memo) {
    auto hit = memo.find(id);
    if (hit != memo.end()) return hit->second;
    const BNode& n = bnodes_[id];
    if (color[id] == 1)
      throw ParseError(file_, n.line, n.col, "reentrancy tags form a cycle");
    color[id] = 1;
    FeatureStructure fs;
    if (n.atom) {
      fs = FeatureStructure::atom(*n.atom);
    } else {
      std::vector<std::pair<std::string, Slot>> arcs;
      arcs.reserve(n.arcs.size());
      for (const BArc& a : n.arcs)
        arcs.emplace_back(a.name, Slot{convert(a.resolved, color, memo), a.pri});
      try {
        fs = FeatureStructure::make(std::move(arcs));
      } catch (const std::invalid_argument& e) {
        throw ParseError(file_, n.line, n.col, e.what());
      }
    }
    color[id] = 2;
    memo.emplace(id, fs);
    return fs;
  }

  std::string file_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  std::vector<BNode> bnodes_;
  std::map<long, int> tag_def_;
  std::map<long, int> tag_placeholder_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read file '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

FeatureStructure parse_fs(const std::string& text) {
  return Reader(text, "").read_single_fs();
}

Grammar parse_grammar(const std::string& text, const std::string& filename) {
  return Reader(text, filename).read_grammar();
}

Lexicon parse_lexicon(const std::string& text, const std::string& filename) {
  return Reader(text, filename).read_lexicon();
}

std::vector<TagProb> parse_tag_probs(const std::string& text, const std::string& filename) {
  std::vector<TagProb> out;
  std::set<std::pair<int, std::string>> seen;
  std::istringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto semi = line.find(';');
    if (semi != std::string::npos) line.erase(semi);
    std::istringstream fields(line);
    std::string tok, id, likestr, extra;
    if (!(fields >> tok)) continue;  // blank line
    auto fail = [&](const std::string& msg) {
      return ParseError(filename, lineno, 1, msg);
    };
    if (!(fields >> id >> likestr) || (fields >> extra))
      throw fail("expected: token-index entry-id likelihood");
    std::size_t used = 0;
    int index = 0;
    double like = 0.0;
    try {
      index = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw fail(fmt::format("token index '{}' is not an integer", tok));
    }
    if (index < 0) throw fail("token index must not be negative");
    try {
      like = std::stod(likestr, &used);
      if (used != likestr.size()) throw std::invalid_argument(likestr);
    } catch (const std::exception&) {
      throw fail(fmt::format("likelihood '{}' is not a number", likestr));
    }
    if (like < 0.0 || like > 1.0) throw fail("likelihood must lie in [0, 1]");
    if (!seen.insert({index, id}).second)
      throw fail(fmt::format("duplicate record for token {} entry '{}'", index, id));
    out.push_back(TagProb{index, id, like, lineno});
  }
  return out;
}

Grammar load_grammar(const std::string& path) {
  return parse_grammar(read_file(path), path);
}

Lexicon load_lexicon(const std::string& path) {
  return parse_lexicon(read_file(path), path);
}

std::vector<TagProb> load_tag_probs(const std::string& path) {
  return parse_tag_probs(read_file(path), path);
}

}  // namespace gu
