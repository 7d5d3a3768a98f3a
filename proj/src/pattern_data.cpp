#include "skillguard/patterns.hpp"

namespace skillguard::patterns {

// Canonical detector set, schema 1. Kept byte-identical with
// data/patterns.json (enforced by test). Instruction-target patterns carry
// semantic-rule ids resolved by the instruction analyzer; code and metadata
// targets carry ECMAScript regexes with an optional icase flag.
std::string_view canonical_pattern_json() {
    static constexpr std::string_view kJson = R"JSON({
  "schema": 1,
  "patterns": [
    {
      "id": "E1",
      "name": "External Data Transmission",
      "phase": "Exfiltration",
      "severity": "HIGH",
      "target": "code",
      "detectors": [
        {"name": "requests_external", "regex": "requests\\.(post|put|get)\\s*\\(.{0,200}https?://(?!localhost|127\\.0\\.0\\.1)"},
        {"name": "urlopen_external", "regex": "urllib\\.request\\.urlopen\\s*\\(.{0,200}https?://(?!localhost|127\\.0\\.0\\.1)"},
        {"name": "fetch_external", "regex": "\\bfetch\\s*\\(\\s*[\"'`]https?://(?!localhost|127\\.0\\.0\\.1)"},
        {"name": "curl_upload", "regex": "\\bcurl\\b[^|\\n]{0,200}(-d\\s|--data\\b|--data-binary|-F\\s|--form\\b|-T\\s|--upload-file)"}
      ]
    },
    {
      "id": "E2",
      "name": "Credential Harvesting",
      "phase": "CredentialAccess",
      "severity": "CRITICAL",
      "target": "code",
      "detectors": [
        {"name": "env_secret", "regex": "os\\.(environ|getenv).{0,160}(key|secret|token|password|api)", "icase": true},
        {"name": "process_env_secret", "regex": "process\\.env.{0,120}(key|secret|token|password|api)", "icase": true}
      ]
    },
    {
      "id": "E3",
      "name": "File System Enumeration",
      "phase": "Reconnaissance",
      "severity": "MEDIUM",
      "target": "code",
      "detectors": [
        {"name": "sensitive_dir_enum", "regex": "(glob|rglob|walk|scandir|listdir|readdir|find)\\w*\\s*\\(?[^\\n]{0,120}(\\.ssh\\b|\\.aws\\b|\\.gnupg\\b)"},
        {"name": "private_key_file", "regex": "\\bid_rsa\\b|\\.pem\\b"}
      ]
    },
    {
      "id": "E4",
      "name": "Network Reconnaissance",
      "phase": "Reconnaissance",
      "severity": "MEDIUM",
      "target": "code",
      "detectors": [
        {"name": "socket_resolve", "regex": "socket\\.(gethostbyname|getaddrinfo)\\s*\\("},
        {"name": "port_scan", "regex": "\\.connect_ex\\s*\\("},
        {"name": "scan_tools", "regex": "\\b(nmap|netstat|masscan)\\b"}
      ]
    },
    {
      "id": "P1",
      "name": "Instruction Override",
      "phase": "Impact",
      "severity": "HIGH",
      "target": "instruction",
      "detectors": [
        {"name": "override", "rule": "instruction_override"}
      ]
    },
    {
      "id": "P2",
      "name": "Hidden Instructions",
      "phase": "DefenseEvasion",
      "severity": "HIGH",
      "target": "instruction",
      "detectors": [
        {"name": "hidden_markup", "rule": "hidden_markup"}
      ]
    },
    {
      "id": "P3",
      "name": "Data Exfiltration via Code Execution",
      "phase": "Exfiltration",
      "severity": "HIGH",
      "target": "instruction",
      "detectors": [
        {"name": "exec_exfiltration", "rule": "exec_exfiltration"}
      ]
    },
    {
      "id": "P4",
      "name": "Behavior Manipulation",
      "phase": "Impact",
      "severity": "MEDIUM",
      "target": "instruction",
      "detectors": [
        {"name": "coercive_steering", "rule": "coercive_steering"}
      ]
    },
    {
      "id": "PE1",
      "name": "Excessive Permissions",
      "phase": "Impact",
      "severity": "LOW",
      "target": "metadata",
      "detectors": [
        {"name": "excessive_permissions", "rule": "excessive_permissions"}
      ]
    },
    {
      "id": "PE2",
      "name": "Privilege Escalation",
      "phase": "Impact",
      "severity": "MEDIUM",
      "target": "code",
      "detectors": [
        {"name": "sudo_use", "regex": "\\b(sudo|doas)\\b"},
        {"name": "chmod_permissive", "regex": "chmod\\s+[0-7]*[67][0-7]*"},
        {"name": "chown_use", "regex": "\\bchown\\b"}
      ]
    },
    {
      "id": "PE3",
      "name": "Credential File Access",
      "phase": "CredentialAccess",
      "severity": "CRITICAL",
      "target": "code",
      "detectors": [
        {"name": "credential_file_open", "regex": "\\bopen\\w*\\s*\\(.{0,160}(\\.ssh/|\\.aws/|credentials\\b|\\.env\\b)"},
        {"name": "credential_file_read", "regex": "\\b(cat|less|head|tail)\\s+[^|\\n]{0,120}(\\.ssh/|\\.aws/|credentials\\b|\\.env\\b)"}
      ]
    },
    {
      "id": "SC1",
      "name": "Command Injection",
      "phase": "Execution",
      "severity": "HIGH",
      "target": "code",
      "detectors": [
        {"name": "subprocess_interp", "regex": "(subprocess\\.(run|call|Popen|check_output|check_call)|os\\.(system|popen))\\s*\\(.{0,200}(\\+|%\\s|\\.format\\(|f[\"'])"},
        {"name": "subprocess_variable", "regex": "(subprocess\\.(run|call|Popen|check_output|check_call)|os\\.(system|popen))\\s*\\(\\s*[A-Za-z_][A-Za-z0-9_.\\[\\]]*\\s*[,)]"},
        {"name": "template_exec", "regex": "\\bexec(Sync)?\\s*\\(\\s*`[^`]*\\$\\{"}
      ]
    },
    {
      "id": "SC2",
      "name": "Remote Script Execution",
      "phase": "Execution",
      "severity": "CRITICAL",
      "target": "code",
      "detectors": [
        {"name": "curl_pipe_shell", "regex": "curl\\b[^\\n|]*\\|\\s*(ba)?sh"},
        {"name": "wget_pipe_shell", "regex": "wget\\b[^\\n|]*\\|\\s*(ba)?sh"},
        {"name": "exec_remote_url", "regex": "exec\\w*\\(.{0,80}https?://"}
      ]
    },
    {
      "id": "SC3",
      "name": "Obfuscated Code",
      "phase": "DefenseEvasion",
      "severity": "CRITICAL",
      "target": "code",
      "detectors": [
        {"name": "b64_exec", "regex": "base64\\.b64decode.{0,160}(exec|eval)|(exec|eval)\\w*\\s*\\(.{0,160}b64decode"},
        {"name": "serialized_load", "regex": "(marshal|pickle)\\.loads\\s*\\("},
        {"name": "hex_exec", "regex": "(fromhex|unhexlify)\\s*\\(.{0,120}(exec|eval)|(exec|eval)\\w*\\s*\\(.{0,120}(fromhex|unhexlify)"},
        {"name": "eval_decode", "regex": "eval\\s*\\(.{0,200}(base64|Buffer\\.from|fromCharCode)"}
      ]
    }
  ]
}
)JSON";
    return kJson;
}

}  // namespace skillguard::patterns
