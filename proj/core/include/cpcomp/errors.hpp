#pragma once

#include <stdexcept>
#include <string>

namespace cpcomp {

// Input document is malformed (bad JSON, bad field, bad value).
class ParseError : public std::runtime_error {
public:
    ParseError(std::string where, const std::string& reason)
        : std::runtime_error(where.empty() ? reason : where + ": " + reason),
          where_(std::move(where)) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

// A policy/acl/node id is referenced but never defined.
class DanglingReference : public ParseError {
public:
    explicit DanglingReference(const std::string& id, const std::string& context)
        : ParseError(context, "dangling reference '" + id + "'"), id_(id) {}
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

// Exhaustive operations refuse instances beyond their size bound.
class InstanceTooLarge : public std::runtime_error {
public:
    explicit InstanceTooLarge(const std::string& what) : std::runtime_error(what) {}
};

// Generator cannot realize the requested size for the requested kind.
class UnsupportedSize : public std::runtime_error {
public:
    explicit UnsupportedSize(const std::string& what) : std::runtime_error(what) {}
};

// Attribute abstraction applied to a node outside its map.
class UnmappedNode : public std::runtime_error {
public:
    explicit UnmappedNode(const std::string& what) : std::runtime_error(what) {}
};

// Policy references a community / local-pref value absent from the variable layout.
class LayoutMiss : public std::runtime_error {
public:
    explicit LayoutMiss(const std::string& what) : std::runtime_error(what) {}
};

// Two relations from different managers/layouts were combined.
class LayoutMismatch : public std::runtime_error {
public:
    explicit LayoutMismatch(const std::string& what) : std::runtime_error(what) {}
};

// An abstraction artifact is missing its certificate block.
class CertificateMissing : public std::runtime_error {
public:
    explicit CertificateMissing(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cpcomp
