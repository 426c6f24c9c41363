"""Plan check logger.

Handle logging of coded plan check errors and warnings.
"""
import json
import os.path


class CheckLogger(object):
    """Class for plan CheckLogger."""

    check_codes = None

    def __init__(self, show_warnings=True, show_errors=True, lang='en'):
        """Initialize plan check logger."""
        self.show_warnings = show_warnings
        self.show_errors = show_errors
        self.lang = lang
        self.codes = {}
        self.messages = []
        self.num_errors = 0
        self.num_warnings = 0
        if CheckLogger.check_codes is None:
            with open(os.path.join(os.path.dirname(__file__), 'data', 'check-codes.json'), 'r') as fh:
                CheckLogger.check_codes = json.load(fh)

    def describe(self, code, severity='error', **args):
        """Message for code with args filled in."""
        entry = self.check_codes.get(code)
        if entry is None or 'description' not in entry:
            return "Unknown %s: %s - params (%s)" % (severity, code, str(args))
        desc = entry['description']
        if self.lang in desc:
            lang_desc = desc[self.lang]
        elif 'en' in desc:
            lang_desc = desc['en']
        else:
            # first key alphabetically
            lang_desc = desc[sorted(desc.keys())[0]]
        params = [str(args[p]) if p in args else '???' for p in entry.get('params', [])]
        try:
            lang_desc = lang_desc % tuple(params)
        except TypeError:
            lang_desc += ' ' + str(args)
        return '[' + code + '] ' + lang_desc

    def error_or_warning(self, code, severity='error', **args):
        """Add error or warning to self.codes and maybe self.messages."""
        message = self.describe(code, severity, **args)
        # Last message per code, full list of messages
        self.codes[code] = message
        if (severity == 'error' and self.show_errors) or (severity != 'error' and self.show_warnings):
            self.messages.append(message)

    def error(self, code, **args):
        """Add error code."""
        self.error_or_warning(code, severity='error', **args)
        self.num_errors += 1

    def warn(self, code, **args):
        """Add warning code."""
        self.error_or_warning(code, severity='warning', **args)
        self.num_warnings += 1

    def __str__(self, prefix=''):
        """String of check status."""
        return '\n'.join(prefix + m for m in sorted(self.messages))
