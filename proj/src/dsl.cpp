#include "toposcalc/dsl.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace toposcalc {

namespace {

struct Token {
  enum class Kind { Ident, Punct, ArrowOp, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_trivia();
    current_.line = line_;
    current_.col = col_;
    if (pos_ >= text_.size()) {
      current_.kind = Token::Kind::End;
      current_.text.clear();
      return;
    }
    char c = text_[pos_];
    if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
      bump();
      bump();
      current_.kind = Token::Kind::ArrowOp;
      current_.text = "->";
      return;
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::string ident;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_')) {
        ident.push_back(text_[pos_]);
        bump();
      }
      current_.kind = Token::Kind::Ident;
      current_.text = std::move(ident);
      return;
    }
    static const std::string punct = "{}[]():;,.=";
    if (punct.find(c) != std::string::npos) {
      current_.kind = Token::Kind::Punct;
      current_.text = std::string(1, c);
      bump();
      return;
    }
    throw Error(ErrorCode::SyntaxError,
                "unexpected character '" + std::string(1, c) + "' at line " +
                    std::to_string(line_) + ", col " + std::to_string(col_));
  }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#' ||
          (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/')) {
        while (pos_ < text_.size() && text_[pos_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token current_;
};

[[noreturn]] void syntax_error(const Token& t, const std::string& expected) {
  throw Error(ErrorCode::SyntaxError,
              "expected " + expected + " at line " + std::to_string(t.line) +
                  ", col " + std::to_string(t.col) +
                  (t.kind == Token::Kind::End ? " (end of input)"
                                              : " (got '" + t.text + "')"));
}

class Parser {
 public:
  Parser(const std::string& text, bool free_compose)
      : lexer_(text), free_compose_(free_compose) {}

  SiteDocument parse() {
    std::optional<SiteDocument> doc;
    RawCategory raw;
    bool have_category = false;
    std::vector<std::pair<std::string, std::vector<std::vector<std::string>>>>
        raw_coverage;
    bool have_coverage = false;

    while (lexer_.peek().kind != Token::Kind::End) {
      Token head = expect_ident("block keyword");
      if (head.text == "category") {
        if (have_category) {
          throw Error(ErrorCode::SemanticError, "duplicate category block");
        }
        raw = parse_category_block();
        have_category = true;
        doc.emplace();
        try {
          doc->site = FinCat::validate(raw, free_compose_);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::UnknownObject ||
              e.code() == ErrorCode::UnknownArrow) {
            throw Error(ErrorCode::SemanticError, e.what());
          }
          throw;
        }
      } else if (head.text == "coverage") {
        require_site(doc, head);
        if (have_coverage) {
          throw Error(ErrorCode::SemanticError, "duplicate coverage block");
        }
        have_coverage = true;
        parse_coverage_block(*doc);
      } else if (head.text == "presheaf") {
        require_site(doc, head);
        parse_presheaf_block(*doc);
      } else if (head.text == "map") {
        require_site(doc, head);
        parse_map_block(*doc);
      } else {
        syntax_error(head, "'category', 'coverage', 'presheaf' or 'map'");
      }
    }
    if (!doc.has_value()) {
      throw Error(ErrorCode::SemanticError, "document has no category block");
    }
    return std::move(*doc);
  }

 private:
  static void require_site(const std::optional<SiteDocument>& doc,
                           const Token& head) {
    if (!doc.has_value()) {
      throw Error(ErrorCode::SemanticError,
                  "'" + head.text + "' block before the category block (line " +
                      std::to_string(head.line) + ")");
    }
  }

  Token expect_ident(const std::string& what) {
    if (lexer_.peek().kind != Token::Kind::Ident) syntax_error(lexer_.peek(), what);
    return lexer_.take();
  }

  void expect_punct(const char* p) {
    if (lexer_.peek().kind != Token::Kind::Punct || lexer_.peek().text != p) {
      syntax_error(lexer_.peek(), std::string("'") + p + "'");
    }
    lexer_.take();
  }

  bool peek_punct(const char* p) {
    return lexer_.peek().kind == Token::Kind::Punct && lexer_.peek().text == p;
  }

  void expect_arrow() {
    if (lexer_.peek().kind != Token::Kind::ArrowOp) {
      syntax_error(lexer_.peek(), "'->'");
    }
    lexer_.take();
  }

  std::vector<std::string> ident_list_until_semicolon() {
    std::vector<std::string> out;
    if (peek_punct(";")) {
      lexer_.take();
      return out;
    }
    while (true) {
      out.push_back(expect_ident("identifier").text);
      if (peek_punct(",")) {
        lexer_.take();
        continue;
      }
      expect_punct(";");
      break;
    }
    return out;
  }

  RawCategory parse_category_block() {
    RawCategory raw;
    expect_punct("{");
    while (!peek_punct("}")) {
      Token section = expect_ident("'objects', 'arrows' or 'compose'");
      expect_punct(":");
      if (section.text == "objects") {
        raw.objects = ident_list_until_semicolon();
      } else if (section.text == "arrows") {
        if (peek_punct(";")) {
          lexer_.take();
          continue;
        }
        while (true) {
          std::string name = expect_ident("arrow name").text;
          expect_punct(":");
          std::string src = expect_ident("source object").text;
          expect_arrow();
          std::string dst = expect_ident("target object").text;
          raw.arrows.push_back({name, src, dst});
          if (peek_punct(",")) {
            lexer_.take();
            continue;
          }
          expect_punct(";");
          break;
        }
      } else if (section.text == "compose") {
        if (peek_punct(";")) {
          lexer_.take();
          continue;
        }
        while (true) {
          expect_punct("(");
          std::string second = expect_ident("arrow name").text;
          expect_punct(".");
          std::string first = expect_ident("arrow name").text;
          expect_punct(")");
          expect_punct("=");
          std::string result = expect_ident("arrow name").text;
          raw.composites.push_back({first, second, result});
          if (peek_punct(",")) {
            lexer_.take();
            continue;
          }
          expect_punct(";");
          break;
        }
      } else {
        syntax_error(section, "'objects', 'arrows' or 'compose'");
      }
    }
    expect_punct("}");
    return raw;
  }

  void parse_coverage_block(SiteDocument& doc) {
    doc.has_coverage = true;
    expect_punct("{");
    while (!peek_punct("}")) {
      Token obj = expect_ident("object name");
      ObjId c;
      try {
        c = doc.site->object_id(obj.text);
      } catch (const Error&) {
        throw Error(ErrorCode::SemanticError,
                    "coverage names unknown object '" + obj.text + "' (line " +
                        std::to_string(obj.line) + ")");
      }
      expect_punct(":");
      while (true) {
        expect_punct("[");
        std::vector<ArrowId> gens;
        while (!peek_punct("]")) {
          Token arrow = expect_ident("arrow name");
          ArrowId f;
          try {
            f = doc.site->arrow_id(arrow.text);
          } catch (const Error&) {
            throw Error(ErrorCode::SemanticError,
                        "coverage names unknown arrow '" + arrow.text +
                            "' (line " + std::to_string(arrow.line) + ")");
          }
          if (doc.site->dst(f) != c) {
            throw Error(ErrorCode::SemanticError,
                        "arrow '" + arrow.text + "' does not land in '" +
                            obj.text + "'");
          }
          gens.push_back(f);
          if (peek_punct(",")) lexer_.take();
        }
        expect_punct("]");
        doc.coverage.push_back({c, generated_sieve(doc.site, c, gens)});
        if (peek_punct(",")) {
          lexer_.take();
          continue;
        }
        expect_punct(";");
        break;
      }
    }
    expect_punct("}");
  }

  void parse_presheaf_block(SiteDocument& doc) {
    Token name = expect_ident("presheaf name");
    for (const auto& p : doc.presheaves) {
      if (p.name == name.text) {
        throw Error(ErrorCode::SemanticError,
                    "duplicate presheaf '" + name.text + "'");
      }
    }
    expect_punct("{");
    const FinCat& cat = *doc.site;
    std::vector<std::vector<std::string>> labels(cat.object_count());
    std::vector<bool> carrier_seen(cat.object_count(), false);
    // Raw actions by arrow: pairs of element labels.
    std::map<ArrowId, std::vector<std::pair<std::string, std::string>>> actions;

    while (!peek_punct("}")) {
      Token key = expect_ident("object or arrow name");
      expect_punct(":");
      if (peek_punct("[")) {
        ObjId c;
        try {
          c = cat.object_id(key.text);
        } catch (const Error&) {
          throw Error(ErrorCode::SemanticError,
                      "carrier for unknown object '" + key.text + "' (line " +
                          std::to_string(key.line) + ")");
        }
        if (carrier_seen[c]) {
          throw Error(ErrorCode::SemanticError,
                      "duplicate carrier for '" + key.text + "'");
        }
        carrier_seen[c] = true;
        expect_punct("[");
        while (!peek_punct("]")) {
          labels[c].push_back(expect_ident("element name").text);
          if (peek_punct(",")) lexer_.take();
        }
        expect_punct("]");
        expect_punct(";");
        std::sort(labels[c].begin(), labels[c].end());
        for (std::size_t i = 1; i < labels[c].size(); ++i) {
          if (labels[c][i] == labels[c][i - 1]) {
            throw Error(ErrorCode::SemanticError,
                        "duplicate element '" + labels[c][i] + "' at '" +
                            key.text + "'");
          }
        }
      } else if (peek_punct("{")) {
        ArrowId f;
        try {
          f = cat.arrow_id(key.text);
        } catch (const Error&) {
          throw Error(ErrorCode::SemanticError,
                      "action for unknown arrow '" + key.text + "' (line " +
                          std::to_string(key.line) + ")");
        }
        expect_punct("{");
        while (!peek_punct("}")) {
          std::string from = expect_ident("element name").text;
          expect_arrow();
          std::string to = expect_ident("element name").text;
          actions[f].push_back({from, to});
          if (peek_punct(",")) lexer_.take();
        }
        expect_punct("}");
        expect_punct(";");
      } else {
        syntax_error(lexer_.peek(), "'[' carrier or '{' action");
      }
    }
    expect_punct("}");

    auto element_index = [&](ObjId c, const std::string& label,
                             const std::string& where) {
      auto it = std::lower_bound(labels[c].begin(), labels[c].end(), label);
      if (it == labels[c].end() || *it != label) {
        throw Error(ErrorCode::SemanticError,
                    "unknown element '" + label + "' of object '" +
                        cat.object_name(c) + "' in " + where);
      }
      return std::uint32_t(it - labels[c].begin());
    };

    std::vector<std::uint32_t> card(cat.object_count());
    for (ObjId c = 0; c < cat.object_count(); ++c) {
      card[c] = std::uint32_t(labels[c].size());
    }
    std::vector<std::vector<std::uint32_t>> act(cat.arrow_count());
    for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
      ObjId a = cat.src(f), b = cat.dst(f);
      if (cat.is_identity(f)) {
        if (actions.count(f)) {
          // Explicit identity actions are allowed but must be identities;
          // the presheaf validator will reject anything else.
        }
        act[f].resize(card[b]);
        for (std::uint32_t i = 0; i < card[b]; ++i) act[f][i] = i;
        if (!actions.count(f)) continue;
      }
      auto it = actions.find(f);
      if (it == actions.end()) {
        if (card[b] == 0) {
          act[f].clear();
          continue;
        }
        throw Error(ErrorCode::SemanticError,
                    "presheaf '" + name.text + "' is missing the action of '" +
                        cat.arrow_name(f) + "'");
      }
      std::vector<std::uint32_t> table(card[b], kNoArrow);
      for (const auto& [from, to] : it->second) {
        std::uint32_t src_elem = element_index(b, from, "presheaf '" + name.text + "'");
        std::uint32_t dst_elem = element_index(a, to, "presheaf '" + name.text + "'");
        if (table[src_elem] != kNoArrow && table[src_elem] != dst_elem) {
          throw Error(ErrorCode::SemanticError,
                      "conflicting action entries for '" + from + "' under '" +
                          cat.arrow_name(f) + "'");
        }
        table[src_elem] = dst_elem;
      }
      for (std::uint32_t i = 0; i < card[b]; ++i) {
        if (table[i] == kNoArrow) {
          throw Error(ErrorCode::SemanticError,
                      "action of '" + cat.arrow_name(f) + "' misses element '" +
                          labels[b][i] + "'");
        }
      }
      if (cat.is_identity(f)) {
        for (std::uint32_t i = 0; i < card[b]; ++i) {
          if (table[i] != i) {
            throw Error(ErrorCode::SemanticError,
                        "identity action of '" + cat.arrow_name(f) +
                            "' is not the identity");
          }
        }
      }
      act[f] = std::move(table);
    }

    doc.presheaves.push_back(
        {name.text, Presheaf(doc.site, std::move(card), std::move(act)),
         std::move(labels)});
  }

  void parse_map_block(SiteDocument& doc) {
    Token name = expect_ident("map name");
    for (const auto& m : doc.maps) {
      if (m.name == name.text) {
        throw Error(ErrorCode::SemanticError, "duplicate map '" + name.text + "'");
      }
    }
    expect_punct(":");
    Token source = expect_ident("source presheaf");
    expect_arrow();
    Token target = expect_ident("target presheaf");
    const auto& sp = doc.presheaf(source.text);
    const auto& tp = doc.presheaf(target.text);

    const FinCat& cat = *doc.site;
    std::vector<std::vector<std::uint32_t>> comp(cat.object_count());
    for (ObjId c = 0; c < cat.object_count(); ++c) {
      comp[c].assign(sp.value.card(c), kNoArrow);
    }

    expect_punct("{");
    while (!peek_punct("}")) {
      Token obj = expect_ident("object name");
      ObjId c;
      try {
        c = cat.object_id(obj.text);
      } catch (const Error&) {
        throw Error(ErrorCode::SemanticError,
                    "map component for unknown object '" + obj.text + "'");
      }
      expect_punct(":");
      expect_punct("{");
      while (!peek_punct("}")) {
        std::string from = expect_ident("element name").text;
        expect_arrow();
        std::string to = expect_ident("element name").text;
        auto find = [&](const SiteDocument::NamedPresheaf& p, ObjId o,
                        const std::string& label) {
          auto it = std::lower_bound(p.labels[o].begin(), p.labels[o].end(), label);
          if (it == p.labels[o].end() || *it != label) {
            throw Error(ErrorCode::SemanticError,
                        "unknown element '" + label + "' in map '" + name.text +
                            "'");
          }
          return std::uint32_t(it - p.labels[o].begin());
        };
        comp[c][find(sp, c, from)] = find(tp, c, to);
        if (peek_punct(",")) lexer_.take();
      }
      expect_punct("}");
      expect_punct(";");
    }
    expect_punct("}");

    for (ObjId c = 0; c < cat.object_count(); ++c) {
      for (std::uint32_t i = 0; i < comp[c].size(); ++i) {
        if (comp[c][i] == kNoArrow) {
          throw Error(ErrorCode::SemanticError,
                      "map '" + name.text + "' misses element '" +
                          sp.labels[c][i] + "' at '" + cat.object_name(c) + "'");
        }
      }
    }
    doc.maps.push_back({name.text, source.text, target.text,
                        PresheafMap(sp.value, tp.value, std::move(comp))});
  }

  Lexer lexer_;
  bool free_compose_;
};

}  // namespace

const SiteDocument::NamedPresheaf& SiteDocument::presheaf(
    const std::string& name) const {
  for (const auto& p : presheaves) {
    if (p.name == name) return p;
  }
  throw Error(ErrorCode::SemanticError, "no presheaf named '" + name + "'");
}

const SiteDocument::NamedMap& SiteDocument::map(const std::string& name) const {
  for (const auto& m : maps) {
    if (m.name == name) return m;
  }
  throw Error(ErrorCode::SemanticError, "no map named '" + name + "'");
}

bool SiteDocument::operator==(const SiteDocument& other) const {
  if (!same_site(site, other.site) || has_coverage != other.has_coverage) {
    return false;
  }
  if (coverage.size() != other.coverage.size() ||
      presheaves.size() != other.presheaves.size() ||
      maps.size() != other.maps.size()) {
    return false;
  }
  for (std::size_t i = 0; i < coverage.size(); ++i) {
    if (coverage[i].object != other.coverage[i].object ||
        coverage[i].sieve != other.coverage[i].sieve) {
      return false;
    }
  }
  for (std::size_t i = 0; i < presheaves.size(); ++i) {
    if (presheaves[i].name != other.presheaves[i].name ||
        presheaves[i].value != other.presheaves[i].value ||
        presheaves[i].labels != other.presheaves[i].labels) {
      return false;
    }
  }
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (maps[i].name != other.maps[i].name ||
        maps[i].value != other.maps[i].value) {
      return false;
    }
  }
  return true;
}

SiteDocument parse_document(const std::string& text, bool free_compose) {
  return Parser(text, free_compose).parse();
}

std::string emit_document(const SiteDocument& doc) {
  const FinCat& cat = *doc.site;
  std::ostringstream out;
  out << "category {\n  objects: ";
  for (ObjId c = 0; c < cat.object_count(); ++c) {
    if (c) out << ", ";
    out << cat.object_name(c);
  }
  out << ";\n";
  bool first = true;
  for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
    if (cat.is_identity(f)) continue;
    out << (first ? "  arrows: " : ", ");
    out << cat.arrow_name(f) << ": " << cat.object_name(cat.src(f)) << " -> "
        << cat.object_name(cat.dst(f));
    first = false;
  }
  if (!first) out << ";\n";
  first = true;
  for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
    for (ArrowId g = 0; g < cat.arrow_count(); ++g) {
      if (!cat.composable(f, g) || cat.is_identity(f) || cat.is_identity(g)) {
        continue;
      }
      out << (first ? "  compose: " : ", ");
      out << "(" << cat.arrow_name(g) << " . " << cat.arrow_name(f)
          << ") = " << cat.arrow_name(cat.compose(f, g));
      first = false;
    }
  }
  if (!first) out << ";\n";
  out << "}\n";

  if (doc.has_coverage) {
    out << "coverage {\n";
    for (const auto& entry : doc.coverage) {
      out << "  " << cat.object_name(entry.object) << ": [";
      for (std::size_t i = 0; i < entry.sieve.arrows().size(); ++i) {
        if (i) out << ", ";
        out << cat.arrow_name(entry.sieve.arrows()[i]);
      }
      out << "];\n";
    }
    out << "}\n";
  }

  for (const auto& p : doc.presheaves) {
    out << "presheaf " << p.name << " {\n";
    for (ObjId c = 0; c < cat.object_count(); ++c) {
      out << "  " << cat.object_name(c) << ": [";
      for (std::size_t i = 0; i < p.labels[c].size(); ++i) {
        if (i) out << ", ";
        out << p.labels[c][i];
      }
      out << "];\n";
    }
    for (ArrowId f = 0; f < cat.arrow_count(); ++f) {
      if (cat.is_identity(f)) continue;
      out << "  " << cat.arrow_name(f) << ": { ";
      ObjId a = cat.src(f), b = cat.dst(f);
      for (std::uint32_t i = 0; i < p.value.card(b); ++i) {
        if (i) out << ", ";
        out << p.labels[b][i] << " -> " << p.labels[a][p.value.act(f, i)];
      }
      out << " };\n";
    }
    out << "}\n";
  }

  for (const auto& m : doc.maps) {
    out << "map " << m.name << ": " << m.source_name << " -> " << m.target_name
        << " {\n";
    const auto& sp = doc.presheaf(m.source_name);
    const auto& tp = doc.presheaf(m.target_name);
    for (ObjId c = 0; c < cat.object_count(); ++c) {
      out << "  " << cat.object_name(c) << ": { ";
      for (std::uint32_t i = 0; i < m.value.source().card(c); ++i) {
        if (i) out << ", ";
        out << sp.labels[c][i] << " -> " << tp.labels[c][m.value.at(c, i)];
      }
      out << " };\n";
    }
    out << "}\n";
  }
  return out.str();
}

}  // namespace toposcalc
