#pragma once

#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

#ifndef XSTRING_FIXTURES
#error "XSTRING_FIXTURES must name the fixture directory"
#endif

inline std::string fixture_path(const std::string& name) { return std::string(XSTRING_FIXTURES) + "/" + name; }

inline std::string read_fixture(const std::string& name) {
  std::ifstream f(fixture_path(name), std::ios::binary);
  if (!f)
    throw std::runtime_error("missing fixture " + name);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}
