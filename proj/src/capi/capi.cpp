#include "ogtt/ogtt.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "core/errors.hpp"
#include "io/config.hpp"
#include "io/runner.hpp"

#if defined(__GNUC__)
#define OGTT_EXPORT __attribute__((visibility("default")))
#else
#define OGTT_EXPORT
#endif

struct ogtt_ctx {
  std::string last_error;
};

namespace {

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

OGTT_EXPORT ogtt_ctx* ogtt_ctx_new(void) {
  try {
    return new ogtt_ctx{};
  } catch (...) {
    return nullptr;
  }
}

OGTT_EXPORT void ogtt_ctx_free(ogtt_ctx* ctx) { delete ctx; }

OGTT_EXPORT int ogtt_run(ogtt_ctx* ctx, const char* request_json,
                         char** response_json) {
  if (ctx == nullptr) return OGTT_ERR_INPUT;
  ctx->last_error.clear();
  if (response_json != nullptr) *response_json = nullptr;
  if (request_json == nullptr) {
    ctx->last_error = "request: null";
    return OGTT_ERR_INPUT;
  }
  try {
    const std::string response = ogtt::run_request(request_json);
    if (response_json != nullptr) {
      *response_json = dup_string(response);
      if (*response_json == nullptr) {
        ctx->last_error = "out of memory";
        return OGTT_ERR_INTERNAL;
      }
    }
    return OGTT_OK;
  } catch (const ogtt::InputError& e) {
    ctx->last_error = e.what();
    return OGTT_ERR_INPUT;
  } catch (const ogtt::ContractError& e) {
    ctx->last_error = e.what();
    return OGTT_ERR_CONTRACT;
  } catch (const ogtt::EstimationError& e) {
    ctx->last_error = e.what();
    return OGTT_ERR_ESTIMATION;
  } catch (const ogtt::SamplerError& e) {
    ctx->last_error = e.what();
    return OGTT_ERR_ESTIMATION;
  } catch (const ogtt::IntegrationError& e) {
    ctx->last_error = e.what();
    return OGTT_ERR_ESTIMATION;
  } catch (const std::exception& e) {
    ctx->last_error = e.what();
    return OGTT_ERR_INTERNAL;
  } catch (...) {
    ctx->last_error = "unknown error";
    return OGTT_ERR_INTERNAL;
  }
}

OGTT_EXPORT const char* ogtt_last_error(const ogtt_ctx* ctx) {
  if (ctx == nullptr) return "";
  return ctx->last_error.c_str();
}

OGTT_EXPORT void ogtt_string_free(char* s) { std::free(s); }

OGTT_EXPORT const char* ogtt_version(void) { return ogtt::kCodeVersion; }

}  // extern "C"
