"use strict";

const { test, assertEqual } = require("../harness/testkit.js");
const { AuditLog } = require("./AuditLog.js");

test("auditRecordsMaskedToken", () => {
  const log = new AuditLog();
  log.record("login", "abcdef123");
  assertEqual(log.entries, ["login token=ab****"]);
  assertEqual(log.size(), 1);
});
