"""Writes the scripted model responses used to record the toy transcript.

Each class gets fault-N.md, judge-N.md and tests-N.md files that the
recorder serves in order whenever a prompt for that class arrives.
"""
import pathlib
import shutil

HERE = pathlib.Path(__file__).resolve().parent
SRC = HERE.parent / "corpus" / "project" / "src"
START = "// MUTANT <START>"
END = "// MUTANT <END>"


def src(name):
    return (SRC / f"{name}.js").read_text()


def mutate(original, old, new, indent="    "):
    """Replaces `old` with a marked region holding `new`."""
    assert original.count(old) == 1, old
    body = "".join(indent + line + "\n" if line else "\n" for line in new.splitlines())
    return original.replace(old, f"{indent}{START}\n{body}{indent}{END}\n")


def fault(code, note="Here is the mutated version of the class."):
    return f"{note}\n\n```javascript\n{code.rstrip(chr(10))}\n```\n"


def tests_reply(code):
    return f"Here is the extended test class.\n\n```javascript\n{code.rstrip(chr(10))}\n```\n"


def extend(name, extra):
    existing = (SRC / f"{name}Test.js").read_text() if (SRC / f"{name}Test.js").exists() else ""
    return existing.rstrip("\n") + "\n\n" + extra.strip("\n") + "\n"


class _No:
    @staticmethod
    def format(why):
        return "{no} The mutated version behaves differently: " + why


NO = _No()
script = {}

# --- killable, adds coverage ---------------------------------------------------
o = src("UserProfile")
script["UserProfile"] = {
    "fault": [fault(mutate(o, '    if (this.hidden) {\n      return "Anonymous";\n    }\n    return this.name;\n',
                           "return this.name;"))],
    "judge": [NO.format(why="hidden users now expose their real name.")],
    "tests": [tests_reply(extend("UserProfile", '''
test("profileHiddenUserIsAnonymous", () => {
  const p = new UserProfile("Bob", "bob@example.com", true);
  assertEqual(p.displayName(), "Anonymous");
});'''))],
}

o = src("ConsentManager")
script["ConsentManager"] = {
    "fault": [fault(mutate(o, "    if (scopes !== undefined) {\n      scopes.delete(scope);\n    }\n",
                           "if (scopes !== undefined) {\n  scopes.has(scope);\n}"))],
    "judge": [NO.format(why="revoke no longer removes the scope.")],
    "tests": [
        # fails on the original: wrong expectation
        tests_reply(extend("ConsentManager", '''
test("consentRevokeKeepsOtherScopes", () => {
  const c = new ConsentManager();
  c.grant("u1", "photos");
  c.grant("u1", "location");
  c.revoke("u1", "photos");
  assertFalse(c.canShare("u1", "location"));
});''')),
        tests_reply(extend("ConsentManager", '''
test("consentRevokeStopsSharing", () => {
  const c = new ConsentManager();
  c.grant("u1", "photos");
  c.revoke("u1", "photos");
  assertFalse(c.canShare("u1", "photos"));
});''')),
    ],
}

o = src("ContactList")
script["ContactList"] = {
    "fault": [fault(mutate(o, "    return this.contacts.filter((c) => !c.blocked.includes(viewerId));\n",
                           "return this.contacts.slice();"))],
    "judge": [NO.format(why="blocked viewers can now see every contact.")],
    "tests": [
        # drops the existing test: not an extension
        tests_reply('''"use strict";

const { test, assertEqual } = require("../harness/testkit.js");
const { ContactList } = require("./ContactList.js");

test("contactsHideFromBlockedViewer", () => {
  const list = new ContactList([{ id: "a", blocked: [] }, { id: "b", blocked: ["x"] }]);
  assertEqual(list.visibleTo("x").map((c) => c.id), ["a"]);
});
'''),
        tests_reply(extend("ContactList", '''
test("contactsHideFromBlockedViewer", () => {
  const list = new ContactList([{ id: "a", blocked: [] }, { id: "b", blocked: ["x"] }]);
  assertEqual(list.visibleTo("x").map((c) => c.id), ["a"]);
});''')),
    ],
}

o = src("PhotoTagger")
script["PhotoTagger"] = {
    "fault": [fault(mutate(o, "    if (!this.consenting.has(userId)) {\n      return false;\n    }\n",
                           "if (!this.consenting.has(userId)) {\n  photo.pendingReview = true;\n}"))],
    "judge": [NO.format(why="users who did not consent get tagged anyway.")],
    "tests": [tests_reply(extend("PhotoTagger", '''
test("taggerSkipsNonConsentingUser", () => {
  const tagger = new PhotoTagger(["ann"]);
  const photo = { tags: [] };
  assertEqual(tagger.tag(photo, "zed"), false);
  assertEqual(photo.tags, []);
});'''))],
}

# --- killable on already-covered lines (no coverage delta) ---------------------
o = src("LocationSharer")
script["LocationSharer"] = {
    "fault": [fault(mutate(o, "    const digits = this.friends.has(viewerId) ? FRIEND_PRECISION : PUBLIC_PRECISION;\n",
                           "const digits = this.friends.has(viewerId) ? FRIEND_PRECISION : FRIEND_PRECISION + 3;"))],
    "judge": [NO.format(why="strangers receive a precise location.")],
    "tests": [tests_reply(extend("LocationSharer", '''
test("locationStrangersSeeCoarsePosition", () => {
  const s = new LocationSharer(["bob"]);
  assertEqual(s.sharedLocation("eve", 51.50735, -0.12776), { lat: 52, lon: -0 });
});'''))],
}

o = src("MessageRedactor")
script["MessageRedactor"] = {
    "fault": [fault(mutate(o, "    return text.replace(PHONE, \"[phone]\");\n",
                           "return text.replace(new RegExp(PHONE.source), \"[phone]\");"))],
    "judge": [NO.format(why="only the first phone number is redacted.")],
    "tests": [tests_reply(extend("MessageRedactor", '''
test("redactorHidesEveryPhoneNumber", () => {
  const r = new MessageRedactor();
  assertEqual(r.redact("555-1234 or 555-9876"), "[phone] or [phone]");
});'''))],
}

o = src("AgeGate")
script["AgeGate"] = {
    "fault": [fault(mutate(o, "    return age >= MINIMUM_AGE;\n", "return age > MINIMUM_AGE;"))],
    "judge": ["Both versions look almost the same to me; I cannot tell without more context."],
    "tests": [
        # flaky: fails on the third run in the same workspace
        tests_reply(extend("AgeGate", '''
test("ageGateBoundaryIsStable", () => {
  const fs = require("fs");
  const runs = fs.existsSync(".agegate-runs") ? Number(fs.readFileSync(".agegate-runs", "utf8")) + 1 : 1;
  fs.writeFileSync(".agegate-runs", String(runs));
  assertTrue(new AgeGate().isAllowed(13) && runs !== 3);
});''')),
        tests_reply(extend("AgeGate", '''
test("ageGateAllowsExactMinimumAge", () => {
  assertTrue(new AgeGate().isAllowed(13));
});''')),
    ],
}

# --- class without an existing test class --------------------------------------
o = src("DataExporter")
script["DataExporter"] = {
    "fault": [
        "I am not able to produce code for this request without more details.",
        fault(mutate(o, "      if (!PRIVATE_FIELDS.includes(key)) {\n        out[key] = record[key];\n      }\n",
                     "if (PRIVATE_FIELDS.indexOf(key) < -1) {\n  continue;\n}\nout[key] = record[key];",
                     indent="      ")),
    ],
    "judge": [NO.format(why="private fields are exported.")],
    "tests": [tests_reply('''"use strict";

const { test, assertEqual } = require("../harness/testkit.js");
const { DataExporter } = require("./DataExporter.js");

test("exporterDropsPrivateFields", () => {
  const out = new DataExporter().exportPublic({ name: "n", email: "e@x", phone: "1" });
  assertEqual(out, { name: "n" });
});
''')],
}

# --- build failure, existing-test kill, then a survivor ------------------------
o = src("AccountDeleter")
script["AccountDeleter"] = {
    "fault": [
        fault(mutate(o, "    this.store.delete(userId);\n", "this.store.delete(userId;")),
        fault(mutate(o, "    this.store.delete(userId);\n", "this.store.get(userId);")),
        fault(mutate(o, "    return backups.filter((b) => b.userId !== userId);\n", "return backups.slice();")),
    ],
    "judge": [NO.format(why="backups of deleted users are kept.")],
    "tests": [
        tests_reply(extend("AccountDeleter", '''
test("deleterPurgeReturnsArray", () => {
  const d = new AccountDeleter(new Map());
  assertTrue(Array.isArray(d.purgeBackups([{ userId: "u1" }], "u1")));
});''')),
        tests_reply(extend("AccountDeleter", '''
test("deleterPurgesUserBackups", () => {
  const d = new AccountDeleter(new Map());
  const left = d.purgeBackups([{ userId: "u1" }, { userId: "u2" }], "u1");
  assertTrue(left.length === 1 && left[0].userId === "u2");
});''')),
    ],
}

# --- marker problems, then killed by the existing suite ------------------------
o = src("NotificationFilter")
script["NotificationFilter"] = {
    "fault": [
        fault(o.replace("    return !this.blocked.has(notification.sender);\n",
                        f"    {START}\n    return true;\n")),
        fault(mutate(o.replace("this.blocked = new Set(blockedSenders);", "this.blocked = new Set();"),
                     "    return !this.blocked.has(notification.sender);\n",
                     "return !this.blocked.has(notification.sender);")),
        fault(mutate(o, "    return !this.blocked.has(notification.sender);\n", "return true;")),
    ],
}

# --- equivalent mutants --------------------------------------------------------
o = src("AuditLog")
script["AuditLog"] = {
    "fault": [fault(mutate(o, "    this.entries.push(event + \" token=\" + maskToken(token));\n",
                           "// Introduce a bug by logging the raw token before masking it\n"
                           "this.entries.push(event + \" token=\" + maskToken(token)); /* leak */"))],
}

o = src("SessionManager")
script["SessionManager"] = {
    "fault": [fault(mutate(o, "    return seen !== undefined && now - seen < IDLE_LIMIT_MS;\n",
                           "return seen !== undefined && now - seen < IDLE_LIMIT_MS;"))],
}

o = src("PasswordPolicy")
script["PasswordPolicy"] = {
    "fault": [fault(mutate(o, "    if (password.toLowerCase().includes(username.toLowerCase())) {\n      return false;\n    }\n",
                           "if (password.includes(username)) {\n  return false;\n}"))],
    "judge": ["{yes} Both versions reject passwords that contain the username."],
}

for name, kinds in script.items():
    d = HERE / name
    shutil.rmtree(d, ignore_errors=True)
    d.mkdir()
    for kind, replies in kinds.items():
        for i, reply in enumerate(replies, 1):
            (d / f"{kind}-{i}.md").write_text(reply)
