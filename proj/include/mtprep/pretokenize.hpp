#pragma once

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mtprep/corpus.hpp"
#include "mtprep/error.hpp"
#include "mtprep/unicode.hpp"

namespace mtprep {

// `none` keeps the whole text as one token. `external` drives a user command
// via the line protocol in run_external_tokenizer.
enum class PretokKind { none, whitespace, intl13a, character, unicode_script, external };

struct Pretokenizer {
  PretokKind kind = PretokKind::whitespace;
  std::string external_command;  // required when kind == external
};

namespace detail {

// Characters isolated by the 13a-style rule list.
inline bool is_pad_cp(char32_t c) {
  switch (c) {
    case U',': case U'.': case U'!': case U'?': case U';': case U':':
    case U'(': case U')': case U'[': case U']': case U'"':
    case 0x300C: case 0x300D:  // corner brackets
    case 0x3001: case 0x3002:  // ideographic comma / full stop
    case 0xFF01: case 0xFF1F:  // fullwidth ! ?
      return true;
    default:
      return false;
  }
}

inline bool attaches_left(char32_t c) {
  switch (c) {
    case U',': case U'.': case U'!': case U'?': case U';': case U':':
    case U')': case U']':
    case 0x300D: case 0x3001: case 0x3002: case 0xFF01: case 0xFF1F:
      return true;
    default:
      return false;
  }
}

inline bool attaches_right(char32_t c) {
  return c == U'(' || c == U'[' || c == 0x300C;
}

inline std::vector<std::string> split_ws(std::string_view text) { return ws_tokens(text); }

inline std::vector<std::string> tokenize_13a(std::string_view text) {
  const std::u32string u = utf8_to_u32(text);
  std::vector<std::string> tokens;
  std::string cur;
  const auto flush = [&] {
    if (!cur.empty()) tokens.push_back(std::move(cur)), cur.clear();
  };
  for (std::size_t i = 0; i < u.size(); ++i) {
    const char32_t c = u[i];
    if (is_space_cp(c)) {
      flush();
      continue;
    }
    if (is_pad_cp(c)) {
      const bool between_digits = c == U'.' && i > 0 && i + 1 < u.size() &&
                                  is_ascii_digit(u[i - 1]) && is_ascii_digit(u[i + 1]);
      if (!between_digits) {
        flush();
        tokens.push_back(utf8_encode(c));
        continue;
      }
    }
    utf8_append(cur, c);
  }
  flush();
  return tokens;
}

inline std::vector<std::string> tokenize_chars(std::string_view text) {
  std::vector<std::string> tokens;
  for (auto& g : grapheme_clusters(text)) {
    char32_t first;
    if (utf8_decode(g, 0, &first) != 0 && is_space_cp(first)) continue;
    tokens.push_back(std::move(g));
  }
  return tokens;
}

inline std::vector<std::string> tokenize_scripts(std::string_view text) {
  const std::u32string u = utf8_to_u32(text);
  std::vector<std::string> tokens;
  std::string cur;
  Script cur_script = Script::Other;
  const auto flush = [&] {
    if (!cur.empty()) tokens.push_back(std::move(cur)), cur.clear();
  };
  for (char32_t c : u) {
    if (is_space_cp(c)) {
      flush();
      continue;
    }
    const Script s = script_of(c);
    if (s == Script::Han) {  // Han runs become single characters
      flush();
      tokens.push_back(utf8_encode(c));
      cur_script = s;
      continue;
    }
    if (cur.empty() || s != cur_script) flush();
    utf8_append(cur, c);
    cur_script = s;
  }
  flush();
  return tokens;
}

inline Script token_script(std::string_view token) {
  char32_t first = 0;
  if (utf8_decode(token, 0, &first) == 0) return Script::Other;
  return script_of(first);
}

inline bool spacing_class(std::string_view token) {
  const Script s = token_script(token);
  return s == Script::Latin || s == Script::Digit;
}

}  // namespace detail

// Batch protocol for external tokenizers (Moses, MeCab, ...): the command
// reads lines on standard input and must emit exactly one space-delimited
// line per input line on standard output. The command string is interpreted
// by /bin/sh.
inline std::vector<std::string> run_external_tokenizer(const std::vector<std::string>& lines,
                                                       const std::string& command) {
  if (command.empty()) throw std::invalid_argument("external tokenizer command is empty");
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path();
  char tmpl_in[4096], tmpl_out[4096];
  std::snprintf(tmpl_in, sizeof(tmpl_in), "%s/mtprep_tok_in_XXXXXX", dir.c_str());
  std::snprintf(tmpl_out, sizeof(tmpl_out), "%s/mtprep_tok_out_XXXXXX", dir.c_str());
  const int fd_in = mkstemp(tmpl_in);
  const int fd_out = mkstemp(tmpl_out);
  if (fd_in < 0 || fd_out < 0) throw IoError("cannot create temporary files");
  close(fd_in);
  close(fd_out);
  const std::string in_path(tmpl_in), out_path(tmpl_out);

  std::vector<std::string> result;
  try {
    write_lines(in_path, lines);
    const std::string cmd = command + " < " + in_path + " > " + out_path;
    const int rc = std::system(cmd.c_str());
    if (rc != 0)
      throw IoError("external tokenizer failed (exit " + std::to_string(rc) + "): " +
                    command);
    result = read_lines(out_path);
  } catch (...) {
    fs::remove(in_path);
    fs::remove(out_path);
    throw;
  }
  fs::remove(in_path);
  fs::remove(out_path);

  if (result.size() != lines.size())
    throw DataError("external tokenizer emitted " + std::to_string(result.size()) +
                    " lines for " + std::to_string(lines.size()) + " inputs");
  return result;
}

inline std::vector<std::string> pretokenize(std::string_view text, const Pretokenizer& tok) {
  switch (tok.kind) {
    case PretokKind::none:
      return text.empty() ? std::vector<std::string>{} : std::vector<std::string>{std::string(text)};
    case PretokKind::whitespace:
      return detail::split_ws(text);
    case PretokKind::intl13a:
      return detail::tokenize_13a(text);
    case PretokKind::character:
      return detail::tokenize_chars(text);
    case PretokKind::unicode_script:
      return detail::tokenize_scripts(text);
    case PretokKind::external: {
      const auto out = run_external_tokenizer({std::string(text)}, tok.external_command);
      return detail::split_ws(out[0]);
    }
  }
  return {};
}

inline std::string detokenize(const std::vector<std::string>& tokens, const Pretokenizer& tok) {
  std::string out;
  switch (tok.kind) {
    case PretokKind::intl13a: {
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::u32string u = utf8_to_u32(tokens[i]);
        const bool left = u.size() == 1 && detail::attaches_left(u[0]);
        bool prev_right = false;
        if (i > 0) {
          const std::u32string p = utf8_to_u32(tokens[i - 1]);
          prev_right = p.size() == 1 && detail::attaches_right(p[0]);
        }
        if (i > 0 && !left && !prev_right) out += ' ';
        out += tokens[i];
      }
      return out;
    }
    case PretokKind::character:
    case PretokKind::unicode_script: {
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0 && detail::spacing_class(tokens[i - 1]) && detail::spacing_class(tokens[i]))
          out += ' ';
        out += tokens[i];
      }
      return out;
    }
    default: {
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out += ' ';
        out += tokens[i];
      }
      return out;
    }
  }
}

}  // namespace mtprep
