/*
 * Copyright (c) 2026, The Compass Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "compass/workflow.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "compass/errors.hpp"

namespace compass {

namespace {

enum class TokKind { kIdent, kInt, kPunct, kArrow, kEnd };

struct Token {
  TokKind kind;
  std::string text;
  std::size_t line;
  std::size_t col;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> Tokenize() {
    std::vector<Token> out;
    while (true) {
      SkipSpaceAndComments();
      if (pos_ >= src_.size()) {
        out.push_back({TokKind::kEnd, "", line_, col_});
        return out;
      }
      char c = src_[pos_];
      std::size_t line = line_, col = col_;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '_')) {
          Advance();
        }
        out.push_back({TokKind::kIdent,
                       std::string(src_.substr(start, pos_ - start)), line,
                       col});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          Advance();
        }
        out.push_back({TokKind::kInt,
                       std::string(src_.substr(start, pos_ - start)), line,
                       col});
      } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
        Advance();
        Advance();
        out.push_back({TokKind::kArrow, "->", line, col});
      } else if (std::string_view("{}();,.:=").find(c) !=
                 std::string_view::npos) {
        Advance();
        out.push_back({TokKind::kPunct, std::string(1, c), line, col});
      } else {
        throw SyntaxError(line, col,
                          std::string("unexpected character '") + c + "'");
      }
    }
  }

 private:
  void Advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void SkipSpaceAndComments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        Advance();
      } else if (c == '#' ||
                 (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/')) {
        while (pos_ < src_.size() && src_[pos_] != '\n') Advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  WorkflowDef ParseWorkflow() {
    ExpectKeyword("workflow");
    WorkflowDef def;
    def.name = ExpectIdent();
    ExpectPunct("{");
    while (PeekKeyword("var")) {
      Next();
      def.variables.push_back(ExpectIdent());
      ExpectPunct(";");
    }
    def.root = ParseActivity();
    ExpectPunct("}");
    if (Peek().kind != TokKind::kEnd) Fail(Peek(), "trailing input");
    return def;
  }

 private:
  const Token& Peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token& Next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void Fail(const Token& t, const std::string& msg) const {
    throw SyntaxError(t.line, t.col, msg);
  }

  bool PeekKeyword(std::string_view kw) const {
    return Peek().kind == TokKind::kIdent && Peek().text == kw;
  }
  bool PeekPunct(std::string_view p) const {
    return Peek().kind == TokKind::kPunct && Peek().text == p;
  }
  void ExpectKeyword(std::string_view kw) {
    if (!PeekKeyword(kw)) {
      Fail(Peek(), "expected '" + std::string(kw) + "'");
    }
    Next();
  }
  void ExpectPunct(std::string_view p) {
    if (!PeekPunct(p)) Fail(Peek(), "expected '" + std::string(p) + "'");
    Next();
  }
  std::string ExpectIdent() {
    if (Peek().kind != TokKind::kIdent) Fail(Peek(), "expected identifier");
    return Next().text;
  }
  std::string OptionalLabel() {
    return Peek().kind == TokKind::kIdent ? Next().text : std::string();
  }

  std::vector<std::string> ParseCondVars() {
    ExpectPunct("(");
    std::vector<std::string> vars{ExpectIdent()};
    while (PeekPunct(",")) {
      Next();
      vars.push_back(ExpectIdent());
    }
    ExpectPunct(")");
    return vars;
  }

  std::pair<std::string, std::string> ParseInOut() {
    ExpectPunct("(");
    ExpectKeyword("in");
    ExpectPunct("=");
    std::string in = ExpectIdent();
    ExpectPunct(",");
    ExpectKeyword("out");
    ExpectPunct("=");
    std::string out = ExpectIdent();
    ExpectPunct(")");
    return {in, out};
  }

  std::vector<Activity> ParseBlock() {
    ExpectPunct("{");
    std::vector<Activity> out;
    while (!PeekPunct("}")) {
      if (Peek().kind == TokKind::kEnd) Fail(Peek(), "unterminated block");
      out.push_back(ParseActivity());
    }
    Next();
    return out;
  }

  Activity ParseActivity() {
    const Token& t = Peek();
    if (t.kind != TokKind::kIdent) Fail(t, "expected activity");
    std::string kw = Next().text;
    Activity a;
    if (kw == "seq") {
      a.id = OptionalLabel();
      a.node = Sequence{ParseBlock()};
    } else if (kw == "flow") {
      a.id = OptionalLabel();
      a.node = Flow{ParseBlock()};
    } else if (kw == "pick") {
      a.id = OptionalLabel();
      Pick p;
      ExpectPunct("{");
      while (PeekKeyword("on")) {
        Next();
        p.events.push_back(ExpectIdent());
        ExpectPunct(":");
        p.bodies.push_back(ParseActivity());
      }
      ExpectPunct("}");
      a.node = std::move(p);
    } else if (kw == "if") {
      a.id = OptionalLabel();
      If n;
      n.cond_vars = ParseCondVars();
      n.branches.push_back(ParseActivity());
      if (PeekKeyword("else")) {
        Next();
        n.branches.push_back(ParseActivity());
      }
      a.node = std::move(n);
    } else if (kw == "while") {
      a.id = OptionalLabel();
      While n;
      n.cond_vars = ParseCondVars();
      if (PeekKeyword("max")) {
        Next();
        if (Peek().kind != TokKind::kInt) Fail(Peek(), "expected integer");
        n.max_iter = std::stoi(Next().text);
      }
      n.body.push_back(ParseActivity());
      a.node = std::move(n);
    } else if (kw == "receive") {
      ExpectPunct("(");
      a.node = Receive{ExpectIdent()};
      ExpectPunct(")");
    } else if (kw == "assign") {
      ExpectPunct("(");
      Assign n;
      n.from = ExpectIdent();
      if (Peek().kind != TokKind::kArrow) Fail(Peek(), "expected '->'");
      Next();
      n.to = ExpectIdent();
      ExpectPunct(")");
      a.node = std::move(n);
    } else if (kw == "invoke") {
      Invoke n;
      n.partner = ExpectIdent();
      ExpectPunct(".");
      n.op = ExpectIdent();
      std::tie(n.input, n.output) = ParseInOut();
      if (PeekKeyword("nonidem")) {
        Next();
        n.idempotent = false;
      }
      if (PeekKeyword("comp")) {
        Next();
        n.comp_partner = ExpectIdent();
        ExpectPunct(".");
        n.comp_op = ExpectIdent();
      }
      a.node = std::move(n);
    } else if (kw == "local") {
      LocalCall n;
      n.op = ExpectIdent();
      std::tie(n.input, n.output) = ParseInOut();
      a.node = std::move(n);
    } else if (kw == "terminate") {
      a.node = Terminate{};
    } else {
      Fail(t, "unknown activity '" + kw + "'");
    }
    return a;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::string AtomicBaseId(const Activity& a) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Invoke>) return n.op;
        if constexpr (std::is_same_v<T, LocalCall>) return n.op;
        if constexpr (std::is_same_v<T, Receive>) return "receive_" + n.var;
        if constexpr (std::is_same_v<T, Assign>)
          return "assign_" + n.from + "_" + n.to;
        if constexpr (std::is_same_v<T, Terminate>) return "terminate";
        if constexpr (std::is_same_v<T, Sequence>) return "seq";
        if constexpr (std::is_same_v<T, Flow>) return "flow";
        if constexpr (std::is_same_v<T, Pick>) return "pick";
        if constexpr (std::is_same_v<T, If>) return "if";
        if constexpr (std::is_same_v<T, While>) return "while";
      },
      a.node);
}

bool IsStructured(const Activity& a) {
  return a.as<Sequence>() || a.as<Flow>() || a.as<Pick>() || a.as<If>() ||
         a.as<While>();
}

// Explicit labels are reserved first; the rest get deterministic ids in
// pre-order: structured activities `<kind><n>`, atomic ones their operation
// name with `#<n>` suffixes on repeats.
void AssignIds(Activity& root) {
  std::set<std::string> used;
  std::vector<Activity*> all;
  auto collect = [&](auto&& self, Activity& a) -> void {
    all.push_back(&a);
    std::visit(
        [&](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Sequence>) {
            for (auto& c : n.children) self(self, c);
          } else if constexpr (std::is_same_v<T, Flow>) {
            for (auto& c : n.branches) self(self, c);
          } else if constexpr (std::is_same_v<T, Pick>) {
            for (auto& c : n.bodies) self(self, c);
          } else if constexpr (std::is_same_v<T, If>) {
            for (auto& c : n.branches) self(self, c);
          } else if constexpr (std::is_same_v<T, While>) {
            for (auto& c : n.body) self(self, c);
          }
        },
        a.node);
  };
  collect(collect, root);

  for (Activity* a : all) {
    if (a->id.empty()) continue;
    if (!used.insert(a->id).second) {
      throw ValidationError("duplicate activity id '" + a->id + "'");
    }
  }
  std::unordered_map<std::string, int> counters;
  for (Activity* a : all) {
    if (!a->id.empty()) continue;
    std::string base = AtomicBaseId(*a);
    int& n = counters[base];
    while (true) {
      ++n;
      std::string candidate;
      if (IsStructured(*a)) {
        candidate = base + std::to_string(n);
      } else {
        candidate = n == 1 ? base : base + "#" + std::to_string(n);
      }
      if (used.insert(candidate).second) {
        a->id = candidate;
        break;
      }
    }
  }
}

void Validate(const WorkflowDef& def) {
  std::set<std::string> declared;
  for (const auto& v : def.variables) {
    if (!declared.insert(v).second) {
      throw ValidationError("variable '" + v + "' declared twice");
    }
  }
  auto check_var = [&](const std::string& v, const Activity& a) {
    if (!declared.count(v)) {
      throw ValidationError("undeclared variable '" + v + "' in activity '" +
                            a.id + "'");
    }
  };
  for_each_activity(def.root, [&](const Activity& a) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Receive>) {
            check_var(n.var, a);
          } else if constexpr (std::is_same_v<T, Invoke> ||
                               std::is_same_v<T, LocalCall>) {
            check_var(n.input, a);
            check_var(n.output, a);
          } else if constexpr (std::is_same_v<T, Assign>) {
            check_var(n.from, a);
            check_var(n.to, a);
          } else if constexpr (std::is_same_v<T, Pick>) {
            if (n.events.empty()) {
              throw ValidationError("empty pick '" + a.id + "'");
            }
            std::set<std::string> seen;
            for (const auto& e : n.events) {
              if (!seen.insert(e).second) {
                throw ValidationError("pick '" + a.id +
                                      "' has duplicate branch event '" + e +
                                      "'");
              }
            }
          } else if constexpr (std::is_same_v<T, If>) {
            if (n.cond_vars.empty() || n.branches.empty()) {
              throw ValidationError("malformed if '" + a.id + "'");
            }
            for (const auto& v : n.cond_vars) check_var(v, a);
          } else if constexpr (std::is_same_v<T, While>) {
            if (n.cond_vars.empty() || n.body.size() != 1) {
              throw ValidationError("malformed while '" + a.id + "'");
            }
            if (n.max_iter < 0) {
              throw ValidationError("negative iteration bound on '" + a.id +
                                    "'");
            }
            for (const auto& v : n.cond_vars) check_var(v, a);
          }
        },
        a.node);
  });
}

void PrintCondVars(std::ostringstream& os, const std::vector<std::string>& v) {
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ")";
}

void PrintActivity(std::ostringstream& os, const Activity& a, int depth) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  std::string inner(static_cast<std::size_t>(depth + 1) * 2, ' ');
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Receive>) {
          os << pad << "receive(" << n.var << ")\n";
        } else if constexpr (std::is_same_v<T, Invoke>) {
          os << pad << "invoke " << n.partner << "." << n.op << "(in="
             << n.input << ", out=" << n.output << ")";
          if (!n.idempotent) os << " nonidem";
          if (n.comp_op) os << " comp " << *n.comp_partner << "." << *n.comp_op;
          os << "\n";
        } else if constexpr (std::is_same_v<T, Assign>) {
          os << pad << "assign(" << n.from << " -> " << n.to << ")\n";
        } else if constexpr (std::is_same_v<T, LocalCall>) {
          os << pad << "local " << n.op << "(in=" << n.input
             << ", out=" << n.output << ")\n";
        } else if constexpr (std::is_same_v<T, Terminate>) {
          os << pad << "terminate\n";
        } else if constexpr (std::is_same_v<T, Sequence> ||
                             std::is_same_v<T, Flow>) {
          os << pad << (std::is_same_v<T, Sequence> ? "seq " : "flow ") << a.id
             << " {\n";
          const auto& kids = [&]() -> const std::vector<Activity>& {
            if constexpr (std::is_same_v<T, Sequence>) {
              return n.children;
            } else {
              return n.branches;
            }
          }();
          for (const auto& c : kids) PrintActivity(os, c, depth + 1);
          os << pad << "}\n";
        } else if constexpr (std::is_same_v<T, Pick>) {
          os << pad << "pick " << a.id << " {\n";
          for (std::size_t i = 0; i < n.events.size(); ++i) {
            os << inner << "on " << n.events[i] << ":\n";
            PrintActivity(os, n.bodies[i], depth + 2);
          }
          os << pad << "}\n";
        } else if constexpr (std::is_same_v<T, If>) {
          os << pad << "if " << a.id << " ";
          PrintCondVars(os, n.cond_vars);
          os << "\n";
          PrintActivity(os, n.branches[0], depth + 1);
          if (n.branches.size() > 1) {
            os << pad << "else\n";
            PrintActivity(os, n.branches[1], depth + 1);
          }
        } else if constexpr (std::is_same_v<T, While>) {
          os << pad << "while " << a.id << " ";
          PrintCondVars(os, n.cond_vars);
          os << " max " << n.max_iter << "\n";
          PrintActivity(os, n.body[0], depth + 1);
        }
      },
      a.node);
}

}  // namespace

std::set<std::string> WorkflowDef::partners() const {
  std::set<std::string> out;
  for_each_activity(root, [&](const Activity& a) {
    if (const auto* inv = a.as<Invoke>()) out.insert(inv->partner);
  });
  return out;
}

WorkflowDef parse_workflow(std::string_view source) {
  Parser parser(Lexer(source).Tokenize());
  WorkflowDef def = parser.ParseWorkflow();
  AssignIds(def.root);
  Validate(def);
  return def;
}

WorkflowDef load_workflow(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open workflow file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_workflow(ss.str());
}

std::string pretty_print(const WorkflowDef& def) {
  std::ostringstream os;
  os << "workflow " << def.name << " {\n";
  for (const auto& v : def.variables) os << "  var " << v << ";\n";
  PrintActivity(os, def.root, 1);
  os << "}\n";
  return os.str();
}

std::map<std::string, std::string> list_compensations(const WorkflowDef& def) {
  std::map<std::string, std::string> out;
  for_each_activity(def.root, [&](const Activity& a) {
    if (const auto* inv = a.as<Invoke>()) {
      out.emplace(inv->op,
                  inv->comp_op ? *inv->comp_op : std::string(kNoopCompensation));
    }
  });
  return out;
}

const Activity* find_activity(const WorkflowDef& def, std::string_view id) {
  const Activity* found = nullptr;
  for_each_activity(def.root, [&](const Activity& a) {
    if (!found && a.id == id) found = &a;
  });
  return found;
}

std::size_t count_change_activities(const WorkflowDef& def) {
  std::size_t n = 0;
  for_each_activity(def.root, [&](const Activity& a) {
    if (a.as<Pick>() || a.as<Flow>()) ++n;
    if (const auto* inv = a.as<Invoke>(); inv && !inv->idempotent) ++n;
  });
  return n;
}

}  // namespace compass
