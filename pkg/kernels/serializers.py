from rest_framework import serializers

from kernels import utils as kernels_utils
from kernels.exact import format_rat, parse_rat
from kernels.ode import BUILDERS, PRESET_PARAMS, DiffOp, preset_operator

COMMANDS = ('expand', 'sctable', 'gensctable', 'kernel', 'assoc', 'genassoc', 'productcheck', 'oracle', 'birat',
            'verlinde', 'cache', 'all')
OPERATOR_COMMANDS = ('expand', 'sctable', 'gensctable', 'kernel', 'assoc', 'genassoc', 'productcheck')
FAMILIES = tuple(sorted(BUILDERS)) + ('custom',)


class RationalField(serializers.Field):
    default_error_messages = {
        'invalid': 'A rational literal "p/q" or an integer is required.',
    }

    def to_internal_value(self, data):
        if isinstance(data, bool) or not isinstance(data, (int, str)):
            self.fail('invalid')
        try:
            return parse_rat(data)
        except kernels_utils.ParamsError:
            self.fail('invalid')

    def to_representation(self, value):
        return format_rat(value)


class OperatorTermField(serializers.ListField):
    """[k, "polynomial"] pairs of a custom operator."""

    def to_internal_value(self, data):
        terms = super().to_internal_value(data)
        for term in terms:
            if not isinstance(term, (list, tuple)) or len(term) != 2 or not isinstance(term[0], int) \
                    or not isinstance(term[1], str):
                raise serializers.ValidationError('operator terms are [k, "polynomial"] pairs')
        return [(k, p) for k, p in terms]


class RunConfigSerializer(serializers.Serializer):
    command = serializers.ChoiceField(choices=COMMANDS)
    target = serializers.CharField(required=False, allow_blank=False)
    family = serializers.ChoiceField(choices=FAMILIES, required=False)
    g = serializers.IntegerField(min_value=1, required=False)
    params = serializers.DictField(child=RationalField(), required=False)
    operator = OperatorTermField(child=serializers.ListField(), required=False)
    N = serializers.IntegerField(min_value=0, required=False)
    M = serializers.IntegerField(min_value=1, required=False)
    seed = serializers.IntegerField(default=1)
    samples = serializers.IntegerField(min_value=1, required=False)
    precision = serializers.IntegerField(min_value=53, required=False)
    max_n = serializers.IntegerField(min_value=1, required=False)
    cache = serializers.CharField(required=False)
    report = serializers.CharField(required=False)
    timings = serializers.BooleanField(default=False)

    def to_internal_value(self, data):
        if not isinstance(data, dict):
            raise serializers.ValidationError({'non_field_errors': ['a config object is required']})
        unknown = sorted(set(data) - set(self.fields))
        if unknown:
            raise serializers.ValidationError({key: ['unknown key'] for key in unknown})
        return super().to_internal_value(data)

    def validate(self, attrs):
        if attrs['command'] in OPERATOR_COMMANDS and not attrs.get('family'):
            raise serializers.ValidationError({'family': ['%s needs an operator family' % attrs['command']]})
        if attrs.get('family') == 'custom' and not attrs.get('operator'):
            raise serializers.ValidationError({'operator': ['the custom family needs operator terms']})
        if attrs.get('operator') and attrs.get('family', 'custom') != 'custom':
            raise serializers.ValidationError({'operator': ['operator terms are only read for the custom family']})
        if attrs.get('family'):
            self.check_operator(attrs)
        return attrs

    def check_operator(self, attrs):
        """Builds the configured operator once so that bad terms or parameters are config errors."""
        family = attrs['family']
        try:
            if family == 'custom':
                DiffOp.from_strings(attrs['operator'], g=attrs.get('g') or 1)
            else:
                params = attrs['params'] if 'params' in attrs else PRESET_PARAMS.get(family, {})
                preset_operator(family, params, attrs.get('g'))
        except kernels_utils.ParamsError as e:
            key = 'operator' if family == 'custom' else 'params'
            raise serializers.ValidationError({key: [str(e)]})
