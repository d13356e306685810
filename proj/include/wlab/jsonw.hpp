#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace wlab {

// Minimal JSON emitter with fixed key order and fixed float formatting
// (17 significant digits), so identical inputs produce byte-identical files.
class JsonWriter {
 public:
  static std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }

  void begin_obj() { open('{'); }
  void end_obj() { close('}'); }
  void begin_arr() { open('['); }
  void end_arr() { close(']'); }

  void key(const std::string& k) {
    comma();
    out_ += '"';
    escape(k);
    out_ += "\":";
    just_keyed_ = true;
  }

  void value_str(const std::string& s) {
    comma();
    out_ += '"';
    escape(s);
    out_ += '"';
  }
  void value_num(double v) {
    comma();
    out_ += num(v);
  }
  void value_int(long long v) {
    comma();
    out_ += std::to_string(v);
  }
  void value_bool(bool b) {
    comma();
    out_ += b ? "true" : "false";
  }
  void value_raw(const std::string& raw) {
    comma();
    out_ += raw;
  }

  void kv(const std::string& k, const std::string& v) { key(k); value_str(v); }
  void kv(const std::string& k, double v) { key(k); value_num(v); }
  void kv(const std::string& k, long long v) { key(k); value_int(v); }
  void kv(const std::string& k, std::size_t v) { key(k); value_int(static_cast<long long>(v)); }
  void kv(const std::string& k, int v) { key(k); value_int(v); }
  void kv(const std::string& k, bool v) { key(k); value_bool(v); }

  const std::string& str() const { return out_; }

 private:
  void open(char c) {
    comma();
    out_ += c;
    need_comma_.push_back(false);
  }
  void close(char c) {
    out_ += c;
    need_comma_.pop_back();
    if (!need_comma_.empty()) need_comma_.back() = true;
  }
  void comma() {
    if (just_keyed_) {
      just_keyed_ = false;
      return;
    }
    if (!need_comma_.empty()) {
      if (need_comma_.back()) out_ += ',';
      need_comma_.back() = true;
    }
  }
  void escape(const std::string& s) {
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\t': out_ += "\\t"; break;
        case '\r': out_ += "\\r"; break;
        default: out_ += c;
      }
    }
  }

  std::string out_;
  std::vector<bool> need_comma_;
  bool just_keyed_ = false;
};

}  // namespace wlab
