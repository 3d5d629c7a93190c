#include <stdio.h>
#include <string.h>
#include "trilocal.h"

#define CHECK(cond)                                               \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "failed at line %d: %s\n", __LINE__, #cond); \
      return 1;                                                   \
    }                                                             \
  } while (0)

int main(void) {
  TlRing *ring = NULL;
  uint64_t n = 0;
  TlCase c;
  CHECK(tl_ring_new("skewpoly(2^6; frob^2)", &ring) == TL_STATUS_OK);
  CHECK(tl_ring_size(ring, &n) == TL_STATUS_OK && n == 4096);
  CHECK(tl_ring_classify(ring, &c) == TL_STATUS_OK && c == TL_CASE_EQUICHARACTERISTIC);
  CHECK(tl_ring_count(ring, &n) == TL_STATUS_OK && n == 3);
  CHECK(tl_ring_class_count(ring, &n) == TL_STATUS_OK && n == 1);
  tl_ring_free(ring);

  CHECK(tl_ring_new("w2(", &ring) == TL_STATUS_INVALID_RING);
  CHECK(tl_last_error() != NULL);

  const char *argv[] = {"count", "--ring", "w2(8)"};
  char *report = NULL;
  CHECK(tl_run_json(3, argv, &report) == TL_STATUS_OK);
  CHECK(strstr(report, "\"triangulations\": 7") != NULL);
  tl_string_free(report);
  puts("ok");
  return 0;
}
