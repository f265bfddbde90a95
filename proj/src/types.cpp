#include "saa/types.hpp"

#include <cctype>
#include <cstdio>

namespace saa {

namespace {

bool all_digits(const std::string& s, std::size_t begin, std::size_t end) {
  if (begin >= end || end > s.size()) return false;
  for (std::size_t i = begin; i < end; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

}  // namespace

std::string YearMonth::str() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
  return buf;
}

YearMonth YearMonth::parse(const std::string& s) {
  if (s.size() != 7 || s[4] != '-' || !all_digits(s, 0, 4) || !all_digits(s, 5, 7)) {
    throw MisalignedDates("bad month key '" + s + "', expected YYYY-MM");
  }
  YearMonth ym;
  ym.year = std::stoi(s.substr(0, 4));
  ym.month = std::stoi(s.substr(5, 2));
  if (ym.month < 1 || ym.month > 12) {
    throw MisalignedDates("month out of range in '" + s + "'");
  }
  return ym;
}

std::string Date::str() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

Date Date::parse(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !all_digits(s, 0, 4) ||
      !all_digits(s, 5, 7) || !all_digits(s, 8, 10)) {
    throw MisalignedDates("bad date '" + s + "', expected YYYY-MM-DD");
  }
  Date d;
  d.year = std::stoi(s.substr(0, 4));
  d.month = std::stoi(s.substr(5, 2));
  d.day = std::stoi(s.substr(8, 2));
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) {
    throw MisalignedDates("date out of range in '" + s + "'");
  }
  return d;
}

}  // namespace saa
