#ifndef COMPARATIVE_H
#define COMPARATIVE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status returned by every function. Positive values mirror the library's
// error codes.
typedef enum CmpStatus {
  CMP_STATUS_OK = 0,
  CMP_STATUS_INVALID = 1,
  CMP_STATUS_GUARD = 2,
  CMP_STATUS_EMPTY_CLASS = 3,
  CMP_STATUS_NO_CONSISTENT_HYPOTHESIS = 4,
  CMP_STATUS_ENUMERATION_CAP = 5,
  CMP_STATUS_RETRY_CAP = 6,
  CMP_STATUS_JSON = 7,
  CMP_STATUS_IO = 8,
  CMP_STATUS_CSV = 9,
  CMP_STATUS_NULL_POINTER = 100,
  CMP_STATUS_UTF8 = 101,
  CMP_STATUS_PANIC = 102,
} CmpStatus;

// Opaque handle to a binary hypothesis class.
typedef struct CmpBinClass CmpBinClass;

// Opaque handle to a real-valued hypothesis class.
typedef struct CmpRealClass CmpRealClass;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failed call on this thread, or NULL. The
// pointer stays valid until the next call into this library on the thread.
const char *cmp_last_error(void);

// Parses a binary class from JSON text.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum CmpStatus cmp_bin_class_from_json(const char *json, struct CmpBinClass **out);

// Parses a real-valued class from JSON text.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum CmpStatus cmp_real_class_from_json(const char *json, struct CmpRealClass **out);

// # Safety
// `c` must be NULL or a handle from [`cmp_bin_class_from_json`] not yet freed.
void cmp_bin_class_free(struct CmpBinClass *c);

// # Safety
// `c` must be NULL or a handle from [`cmp_real_class_from_json`] not yet freed.
void cmp_real_class_free(struct CmpRealClass *c);

// Writes the domain size and member count of a binary class.
//
// # Safety
// `c` must be a live handle; `domain` and `members` valid pointers.
enum CmpStatus cmp_bin_class_shape(const struct CmpBinClass *c, size_t *domain, size_t *members);

// VC dimension of a binary class.
//
// # Safety
// `c` must be a live handle and `out` a valid pointer.
enum CmpStatus cmp_vc(const struct CmpBinClass *c, int64_t *out);

// Mutual VC dimension of two binary classes on the same domain.
//
// # Safety
// `s` and `b` must be live handles and `out` a valid pointer.
enum CmpStatus cmp_mutual_vc(const struct CmpBinClass *s,
                             const struct CmpBinClass *b,
                             int64_t *out);

// Littlestone dimension of a binary class.
//
// # Safety
// `c` must be a live handle and `out` a valid pointer.
enum CmpStatus cmp_ldim(const struct CmpBinClass *c, int64_t *out);

// Mutual Littlestone dimension of two binary classes.
//
// # Safety
// `s` and `b` must be live handles and `out` a valid pointer.
enum CmpStatus cmp_mutual_ldim(const struct CmpBinClass *s,
                               const struct CmpBinClass *b,
                               int64_t *out);

// Mutual fat-shattering dimension at margin `eta`.
//
// # Safety
// `s` and `b` must be live handles and `out` a valid pointer.
enum CmpStatus cmp_mutual_fat(const struct CmpRealClass *s,
                              const struct CmpRealClass *b,
                              double eta,
                              int64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COMPARATIVE_H */
